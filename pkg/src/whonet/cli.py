from __future__ import annotations

import argparse
import glob
import logging
from pathlib import Path
from typing import Dict, List, Optional, Sequence

import pandas as pd

from .config import RunConfig, load_config, resolve
from .dataset.io import export_csv, ingest_csv, load_schema, split_segments
from .dataset.synthetic import PRESETS, generate_synthetic
from .dataset.windows import OUTAGE_LENGTHS, build_corpus
from .errors import EXIT_IO, EXIT_OK, ConfigError, NoDataError, WhonetError
from .evaluation import ErrorPredictor, NullPredictor, OraclePredictor, evaluate_windows
from .geodesy import GNSS_ACCURACY_M
from .manifest import build_manifest, config_hash, fingerprint, write_manifest
from .models import WheelRecord
from .network import PARAM_TABLE_WIDTHS, CellKind, param_count, param_table
from .report import render_table, write_report
from .storage import load_model, save_model
from .training import fit_summary, train

log = logging.getLogger(__name__)


def expand_inputs(patterns: Sequence[str]) -> List[Path]:
    """Sorted, de-duplicated files matched by ``patterns`` (globs or plain paths)."""
    found = []
    for pattern in patterns:
        matches = sorted(glob.glob(pattern))
        if not matches and Path(pattern).is_file():
            matches = [pattern]
        found.extend(Path(m) for m in matches)
    files = sorted(set(found))
    if not files:
        raise NoDataError(f'no input files match {" ".join(patterns)}')
    return files


def load_streams(files: Sequence[Path], cfg: RunConfig) -> List[List[WheelRecord]]:
    return [ingest_csv(f, cfg.schema) for f in files]


def format_params(rows: List[Dict[str, int]]) -> str:
    kinds = [k.value for k in CellKind]
    header = ['hidden'] + kinds
    body = [[str(r['hidden'])] + [str(r[k]) for k in kinds] for r in rows]
    widths = [max(len(line[i]) for line in [header] + body) for i in range(len(header))]
    return '\n'.join('  '.join(c.rjust(w) for c, w in zip(line, widths)) for line in [header] + body)


def _run_config(args: argparse.Namespace, overrides: Optional[dict] = None) -> RunConfig:
    overrides = dict(overrides or {})
    overrides['seed'] = args.seed
    return resolve(args.cmd, load_config(args.config), overrides, out_dir=args.out)


def _hashable(cfg: RunConfig) -> dict:
    d = cfg.to_dict()
    d.pop('out_dir')
    return d


def cmd_synth(args: argparse.Namespace) -> int:
    synthetic = {'preset': args.preset, 'duration': args.duration}
    cfg = _run_config(args, {'synthetic': synthetic})
    syn = cfg.synthetic_config()
    records = generate_synthetic(syn)
    path = export_csv(records, cfg.out_dir / f'{args.name}.csv', cfg.schema)
    manifest = build_manifest('synth', cfg.to_dict(), outputs=[path],
                              extra={'synthetic_resolved': syn.to_dict(), 'n_records': len(records)})
    write_manifest(manifest, cfg.out_dir, f'{args.name}.manifest.json')
    print(path)
    return EXIT_OK


def cmd_ingest(args: argparse.Namespace) -> int:
    cfg = _run_config(args)
    if args.schema:
        cfg.schema = load_schema(args.schema)
    files = expand_inputs(args.data)
    inputs, outputs = [], []
    for f in files:
        records = ingest_csv(f, cfg.schema)
        segments = split_segments(records)
        windows = build_corpus([records], cfg.calibration, stationary_bound=cfg.dataset['stationary_bound'])
        print(f'{f}: {len(records)} records, {len(segments)} segments, {len(windows)} windows')
        inputs.append(f)
        outputs.append(export_csv(records, cfg.out_dir / f'{f.stem}.canonical.csv'))
    write_manifest(build_manifest('ingest', cfg.to_dict(), inputs=inputs, outputs=outputs), cfg.out_dir,
                   'ingest.manifest.json')
    return EXIT_OK


def cmd_train(args: argparse.Namespace) -> int:
    model = {'cell': args.cell, 'hidden': args.hidden, 'dropout_rate': args.dropout,
             'stateful': False if args.stateless else None}
    training = {'learning_rate': args.lr, 'batch_size': args.batch_size, 'epochs': args.epochs}
    cfg = _run_config(args, {'model': model, 'train': training, 'calibration': {'r': args.r},
                             'dataset': {'stride': args.stride}})
    if args.schema:
        cfg.schema = load_schema(args.schema)
    files = expand_inputs(args.data)
    windows = build_corpus(load_streams(files, cfg), cfg.calibration, stride=cfg.dataset['stride'],
                           stationary_bound=cfg.dataset['stationary_bound'])
    if not windows:
        raise NoDataError('input files yield no complete one-second windows')

    result = train(windows, cfg.model, cfg.train, calibration=cfg.calibration)
    result.model.manifest['config_sha256'] = config_hash(_hashable(cfg))
    result.model.manifest['inputs_sha256'] = [fingerprint(f)['sha256'] for f in files]
    model_path = save_model(result.model, args.model_out or cfg.out_dir / 'model.json')

    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    trace_path = cfg.out_dir / 'loss_trace.csv'
    trace = pd.DataFrame({'epoch': range(1, len(result.loss_trace) + 1), 'mae': result.loss_trace})
    trace.to_csv(trace_path, index=False, lineterminator='\n')
    summary = fit_summary(result.model, windows)
    log.info('training-set MAE (eval mode) %.6f m over %d windows', summary['mae'], len(windows))
    write_manifest(build_manifest('train', cfg.to_dict(), inputs=files, outputs=[model_path, trace_path],
                                  extra={'final_loss': result.loss_trace[-1], 'fit': summary,
                                         'gnss_accuracy_m': GNSS_ACCURACY_M}),
                   cfg.out_dir, 'train.manifest.json')
    print(model_path)
    return EXIT_OK


def cmd_eval(args: argparse.Namespace) -> int:
    cfg = _run_config(args, {'eval': {'outage_len_s': args.outage_len, 'workers': args.workers},
                             'calibration': {'r': args.r}})
    if args.schema:
        cfg.schema = load_schema(args.schema)
    predictor: ErrorPredictor
    inputs: List[Path] = []
    if args.null_model:
        predictor = NullPredictor()
    elif args.oracle_model:
        predictor = OraclePredictor()
    else:
        if not args.model:
            raise ConfigError('eval needs --model unless --null-model or --oracle-model is given')
        model = load_model(args.model)
        predictor = model
        inputs.append(Path(args.model))
        if model.calibration is not None:
            cfg.calibration = model.calibration
    files = expand_inputs(args.data)
    inputs.extend(files)
    # evaluation always uses non-overlapping windows
    windows = build_corpus(load_streams(files, cfg), cfg.calibration,
                           stationary_bound=cfg.dataset['stationary_bound'])
    scenario = args.scenario or (files[0].stem if len(files) == 1 else 'test')
    result = evaluate_windows(predictor, windows, cfg.eval['outage_len_s'], scenario=scenario,
                              workers=cfg.eval.get('workers'))
    paths = write_report([result], cfg.out_dir)
    write_manifest(build_manifest('eval', cfg.to_dict(), inputs=inputs, outputs=list(paths.values()),
                                  extra={'reduction': result.summary.reduction(),
                                         'gnss_accuracy_m': GNSS_ACCURACY_M}),
                   cfg.out_dir, 'eval.manifest.json')
    print(render_table([result.summary]), end='')
    return EXIT_OK


def cmd_params(args: argparse.Namespace) -> int:
    if args.cell and not args.table:
        hidden = args.hidden if args.hidden is not None else 72
        print(param_count(args.cell, args.input_dim, hidden))
        return EXIT_OK
    widths = [args.hidden] if args.hidden is not None else PARAM_TABLE_WIDTHS
    print(format_params(param_table(args.input_dim, widths)))
    return EXIT_OK


def _common() -> argparse.ArgumentParser:
    c = argparse.ArgumentParser(add_help=False)
    c.add_argument('--seed', type=int, default=None, help='Seed for data, init, dropout and shuffling (default: 0)')
    c.add_argument('--out', default='out', help='Output directory (default: out)')
    c.add_argument('--config', default=None, help='YAML run config; flags override it')
    c.add_argument('-v', '--verbose', action='store_true', help='Debug logging')
    c.add_argument('-q', '--quiet', action='store_true', help='Warnings and errors only')
    return c


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    p = argparse.ArgumentParser(prog='whonet', description='Wheel-odometry error correction during GNSS outages')
    sub = p.add_subparsers(dest='cmd', required=True)

    synth_p = sub.add_parser('synth', parents=[common], help='Generate a synthetic wheel-speed/GNSS drive')
    synth_p.add_argument('--preset', choices=PRESETS, default=None, help='Scenario preset (default: mixed)')
    synth_p.add_argument('--duration', type=float, default=None, help='Drive length in seconds (default: 600)')
    synth_p.add_argument('--name', default='synthetic', help='Output file stem (default: synthetic)')

    ingest_p = sub.add_parser('ingest', parents=[common], help='Validate a dataset and write canonical CSV')
    ingest_p.add_argument('data', nargs='+', help='CSV files or glob patterns')
    ingest_p.add_argument('--schema', default=None, help='YAML column/unit schema')

    train_p = sub.add_parser('train', parents=[common], help='Train an error-prediction network')
    train_p.add_argument('data', nargs='+', help='CSV files or glob patterns')
    train_p.add_argument('--schema', default=None, help='YAML column/unit schema')
    train_p.add_argument('--cell', type=str.upper, choices=[k.value for k in CellKind], default=None,
                         help='Hidden layer kind (default: SRNN)')
    train_p.add_argument('--hidden', type=int, default=None, help='Hidden units (default: 72)')
    train_p.add_argument('--epochs', type=int, default=None, help='Epochs (default: 100)')
    train_p.add_argument('--lr', type=float, default=None, help='Adamax learning rate (default: 0.0007)')
    train_p.add_argument('--batch-size', type=int, default=None, help='Batch size (default: 128)')
    train_p.add_argument('--dropout', type=float, default=None, help='Dropout rate (default: 0.05)')
    train_p.add_argument('--r', type=float, default=None, help='Wheel calibration constant in m (default: 0.3)')
    train_p.add_argument('--stride', type=int, default=None,
                         help='Window step in records; below 10 overlaps training windows (default: 10)')
    train_p.add_argument('--stateless', action='store_true', help='Reset hidden state every window and shuffle')
    train_p.add_argument('--model-out', default=None, help='Model file path (default: <out>/model.json)')

    eval_p = sub.add_parser('eval', parents=[common], help='Score a model over simulated GNSS outages')
    eval_p.add_argument('data', nargs='+', help='CSV files or glob patterns')
    eval_p.add_argument('--model', default=None, help='Model file written by train')
    eval_p.add_argument('--outage-len', type=int, choices=OUTAGE_LENGTHS, default=None,
                        help='Outage length in seconds (default: 30)')
    eval_p.add_argument('--schema', default=None, help='YAML column/unit schema')
    eval_p.add_argument('--r', type=float, default=None, help='Calibration constant when the model has none')
    eval_p.add_argument('--scenario', default=None, help='Scenario label in the report')
    eval_p.add_argument('--workers', type=int, default=None, help='Worker threads (default: physical cores)')
    which = eval_p.add_mutually_exclusive_group()
    which.add_argument('--null-model', action='store_true', help='Predict zero error (physical model only)')
    which.add_argument('--oracle-model', action='store_true', help='Predict the true error')

    params_p = sub.add_parser('params', parents=[common], help='Trainable parameter counts')
    params_p.add_argument('--table', action='store_true', help='Full table for widths 32..512 (default)')
    params_p.add_argument('--cell', type=str.upper, choices=[k.value for k in CellKind], default=None)
    params_p.add_argument('--hidden', type=int, default=None, help='Hidden units (default: 72 with --cell)')
    params_p.add_argument('--input-dim', type=int, default=40, help='Input features (default: 40)')

    return p


COMMANDS = {
    'synth': cmd_synth,
    'ingest': cmd_ingest,
    'train': cmd_train,
    'eval': cmd_eval,
    'params': cmd_params,
}


def run_cli(args: argparse.Namespace) -> int:
    try:
        return COMMANDS[args.cmd](args)
    except WhonetError as exc:
        log.error('%s', exc)
        return exc.exit_code
    except OSError as exc:
        log.error('I/O error: %s', exc)
        return EXIT_IO
