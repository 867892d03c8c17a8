from __future__ import annotations

import hashlib
import json
import logging
import platform
from pathlib import Path
from typing import Any, Dict, Iterable, Optional

import psutil

from . import __version__

log = logging.getLogger(__name__)

MANIFEST_NAME = 'manifest.json'


def canonical_json(data: Any) -> str:
    return json.dumps(data, sort_keys=True, separators=(',', ':'), default=str)


def config_hash(config: Dict[str, Any]) -> str:
    return hashlib.sha256(canonical_json(config).encode('utf-8')).hexdigest()


def fingerprint(path: str | Path) -> Dict[str, Any]:
    path = Path(path)
    digest = hashlib.sha256()
    with open(path, 'rb') as f:
        for chunk in iter(lambda: f.read(1 << 20), b''):
            digest.update(chunk)
    return {'path': str(path), 'bytes': path.stat().st_size, 'sha256': digest.hexdigest()}


def host_info() -> Dict[str, Any]:
    # 主机信息仅作记录, 不参与哈希
    return {
        'python': platform.python_version(),
        'platform': platform.platform(),
        'cpu_physical': psutil.cpu_count(logical=False),
        'cpu_logical': psutil.cpu_count(),
        'memory_bytes': psutil.virtual_memory().total,
    }


def build_manifest(command: str, config: Dict[str, Any], inputs: Iterable[str | Path] = (),
                   outputs: Iterable[str | Path] = (), extra: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
    manifest = {
        'command': command,
        'whonet_version': __version__,
        'config': config,
        'config_sha256': config_hash(config),
        'seed': config.get('seed'),
        'inputs': [fingerprint(p) for p in inputs],
        'outputs': [fingerprint(p) for p in outputs],
        'host': host_info(),
    }
    if extra:
        manifest.update(extra)
    return manifest


def write_manifest(manifest: Dict[str, Any], out_dir: str | Path, name: str = MANIFEST_NAME) -> Path:
    path = Path(out_dir) / name
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(manifest, sort_keys=True, indent=2, default=str) + '\n', encoding='utf-8')
    log.info('wrote %s', path)
    return path
