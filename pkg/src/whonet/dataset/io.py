from __future__ import annotations

import logging
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence

import numpy as np
import pandas as pd
import yaml

from ..errors import DataIntegrityError, SchemaError
from ..models import SAMPLE_DT, GnssFix, WheelRecord, WheelSpeeds

log = logging.getLogger(__name__)

FIELDS = ('timestamp', 'wheel_fl', 'wheel_fr', 'wheel_rl', 'wheel_rr', 'lat', 'lon', 'yaw')
WHEEL_UNITS = ('rad/s', 'km/h')
YAW_UNITS = ('rad', 'deg')
TIME_UNITS = ('s', 'ms')

MAX_GAP = 0.12  # s; larger steps start a new segment
MIN_STEP = SAMPLE_DT - 0.02


def _default_columns() -> Dict[str, str]:
    cols = {f: f for f in FIELDS}
    cols['timestamp'] = 't'
    return cols


@dataclass
class SchemaConfig:
    """Maps dataset columns onto record fields and declares their units."""
    columns: Dict[str, str] = field(default_factory=_default_columns)
    wheel_unit: str = 'rad/s'
    yaw_unit: str = 'rad'
    time_unit: str = 's'
    kmh_per_rad_s: Optional[float] = None  # 3.6 * rolling radius

    def validate(self) -> None:
        missing = [f for f in FIELDS if f not in self.columns]
        if missing:
            raise SchemaError(f'schema does not map fields: {", ".join(missing)}')
        if self.wheel_unit not in WHEEL_UNITS:
            raise SchemaError(f'unknown wheel unit {self.wheel_unit!r}, expected one of {WHEEL_UNITS}')
        if self.yaw_unit not in YAW_UNITS:
            raise SchemaError(f'unknown yaw unit {self.yaw_unit!r}, expected one of {YAW_UNITS}')
        if self.time_unit not in TIME_UNITS:
            raise SchemaError(f'unknown timestamp unit {self.time_unit!r}, expected one of {TIME_UNITS}')
        if self.wheel_unit == 'km/h' and not self.kmh_per_rad_s:
            raise SchemaError('wheel speeds declared in km/h but no conversions.kmh_per_rad_s entry given')
        if self.kmh_per_rad_s is not None and self.kmh_per_rad_s <= 0:
            raise SchemaError('conversions.kmh_per_rad_s must be > 0')

    @property
    def wheel_scale(self) -> float:
        """Factor turning file wheel values into rad/s."""
        return 1.0 / self.kmh_per_rad_s if self.wheel_unit == 'km/h' else 1.0

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> 'SchemaConfig':
        data = dict(data or {})
        units = data.get('units', {}) or {}
        conversions = data.get('conversions', {}) or {}
        columns = _default_columns()
        columns.update(data.get('columns', {}) or {})
        schema = cls(
            columns=columns,
            wheel_unit=units.get('wheel', data.get('wheel_unit', 'rad/s')),
            yaw_unit=units.get('yaw', data.get('yaw_unit', 'rad')),
            time_unit=units.get('timestamp', data.get('time_unit', 's')),
            kmh_per_rad_s=conversions.get('kmh_per_rad_s', data.get('kmh_per_rad_s')),
        )
        schema.validate()
        return schema


def load_schema(path: str | Path | None) -> SchemaConfig:
    if path is None:
        return SchemaConfig()
    with open(path, 'r', encoding='utf-8') as f:
        return SchemaConfig.from_dict(yaml.safe_load(f) or {})


def ingest_csv(path: str | Path, schema: SchemaConfig | None = None) -> List[WheelRecord]:
    """Read one dataset file into time-sorted, validated records."""
    schema = schema or SchemaConfig()
    schema.validate()
    df = pd.read_csv(path, float_precision='round_trip')
    wanted = [schema.columns[f] for f in FIELDS]
    missing = [c for c in wanted if c not in df.columns]
    if missing:
        raise SchemaError(f'{path}: missing columns {", ".join(missing)}')

    data = {f: df[schema.columns[f]].to_numpy(dtype=np.float64) for f in FIELDS}
    if schema.time_unit == 'ms':
        data['timestamp'] = data['timestamp'] / 1000.0
    for w in ('wheel_fl', 'wheel_fr', 'wheel_rl', 'wheel_rr'):
        data[w] = data[w] * schema.wheel_scale
    if schema.yaw_unit == 'deg':
        data['yaw'] = np.radians(data['yaw'])
    bad = ~np.isfinite(np.column_stack([data[f] for f in FIELDS])).all(axis=1)
    if bad.any():
        raise DataIntegrityError(f'{path}: {int(bad.sum())} rows with missing or non-finite values')

    order = np.argsort(data['timestamp'], kind='stable')
    t = data['timestamp'][order]
    steps = np.diff(t)
    if (steps <= 0).any():
        raise DataIntegrityError(f'{path}: duplicate timestamp at t={t[1:][steps <= 0][0]}')
    if (steps < MIN_STEP).any():
        raise DataIntegrityError(f'{path}: sampling step below the 10 Hz grid at t={t[1:][steps < MIN_STEP][0]}')

    records = [
        WheelRecord(
            t=float(data['timestamp'][i]),
            wheels=WheelSpeeds(float(data['wheel_fl'][i]), float(data['wheel_fr'][i]),
                               float(data['wheel_rl'][i]), float(data['wheel_rr'][i])),
            fix=GnssFix(lat=float(data['lat'][i]), lon=float(data['lon'][i])),
            yaw=float(data['yaw'][i]),
        )
        for i in order
    ]
    n_breaks = int((steps > MAX_GAP).sum())
    log.info('ingested %d records from %s (%d segments)', len(records), path, n_breaks + 1 if records else 0)
    return records


def split_segments(records: Sequence[WheelRecord], max_gap: float = MAX_GAP) -> List[List[WheelRecord]]:
    """Cut a sorted record stream wherever consecutive samples are more than ``max_gap`` apart."""
    segments: List[List[WheelRecord]] = []
    current: List[WheelRecord] = []
    for rec in records:
        if current and rec.t - current[-1].t > max_gap:
            segments.append(current)
            current = []
        current.append(rec)
    if current:
        segments.append(current)
    return segments


def records_frame(records: Sequence[WheelRecord], schema: SchemaConfig | None = None) -> pd.DataFrame:
    schema = schema or SchemaConfig()
    schema.validate()
    t = np.array([r.t for r in records], dtype=np.float64)
    yaw = np.array([r.yaw for r in records], dtype=np.float64)
    wheels = np.array([r.wheels.as_tuple() for r in records], dtype=np.float64).reshape(-1, 4)
    wheels = wheels / schema.wheel_scale
    cols = {
        'timestamp': t * 1000.0 if schema.time_unit == 'ms' else t,
        'wheel_fl': wheels[:, 0], 'wheel_fr': wheels[:, 1],
        'wheel_rl': wheels[:, 2], 'wheel_rr': wheels[:, 3],
        'lat': np.array([r.fix.lat for r in records], dtype=np.float64),
        'lon': np.array([r.fix.lon for r in records], dtype=np.float64),
        'yaw': np.degrees(yaw) if schema.yaw_unit == 'deg' else yaw,
    }
    return pd.DataFrame({schema.columns[f]: cols[f] for f in FIELDS})


def export_csv(records: Sequence[WheelRecord], path: str | Path, schema: SchemaConfig | None = None) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    records_frame(records, schema).to_csv(path, index=False, lineterminator='\n')
    log.info('wrote %d records to %s', len(records), path)
    return path
