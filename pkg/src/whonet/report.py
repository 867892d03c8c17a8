"""Renderers for evaluation results: aligned text, CSV and GeoJSON."""
from __future__ import annotations

import json
import logging
from pathlib import Path
from typing import Dict, List, Sequence

import pandas as pd

from .evaluation import METHODS, METRICS, ExperimentResult, MetricsSummary, reconstruct_trajectories

log = logging.getLogger(__name__)

CSV_COLUMNS = ['scenario', 'method', 'metric', 'max', 'min', 'mean', 'std', 'total_distance_m', 'n_sequences']
DETAIL_COLUMNS = ['scenario', 'sequence', 'segment', 'second', 'method', 'error', 'crse_cum', 'cte_cum']
DISTANCE = 'distance'


def summary_rows(summaries: Sequence[MetricsSummary]) -> List[dict]:
    rows = []
    for s in summaries:
        common = {'scenario': s.scenario, 'total_distance_m': s.total_distance, 'n_sequences': s.n_sequences}
        for method in METHODS:
            for metric in METRICS:
                rows.append(dict(common, method=method, metric=metric, **s.methods[method].stat(metric).as_dict()))
        rows.append(dict(common, method='gnss', metric=DISTANCE, **s.distance.as_dict()))
    return rows


def summary_frame(summaries: Sequence[MetricsSummary]) -> pd.DataFrame:
    return pd.DataFrame(summary_rows(summaries), columns=CSV_COLUMNS)


def write_csv(summaries: Sequence[MetricsSummary], path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    summary_frame(summaries).to_csv(path, index=False, lineterminator='\n')
    log.info('wrote %s', path)
    return path


def read_csv(path: str | Path) -> pd.DataFrame:
    return pd.read_csv(path, float_precision='round_trip')


def _fmt(value) -> str:
    if isinstance(value, float):
        return f'{value:.3f}'
    return str(value)


def render_table(summaries: Sequence[MetricsSummary]) -> str:
    """Aligned plain-text table; header only when there is nothing to show."""
    header = ['scenario', 'outage_s'] + CSV_COLUMNS[1:]
    body = []
    for s in summaries:
        for row in summary_rows([s]):
            body.append([_fmt(s.scenario), str(s.outage_len_s)] + [_fmt(row[c]) for c in CSV_COLUMNS[1:]])
    widths = [max(len(r[i]) for r in [header] + body) for i in range(len(header))]
    lines = ['  '.join(cell.ljust(w) if i < 4 else cell.rjust(w) for i, (cell, w) in enumerate(zip(r, widths))).rstrip()
             for r in [header] + body]
    for s in summaries:
        parts = []
        for key, pct in s.reduction().items():
            if key.endswith('.mean') or key.endswith('.max'):
                parts.append(f'{key} ' + ('n/a' if pct is None else f'{pct:.1f}%'))
        lines.append(f'{s.scenario} {s.outage_len_s}s reduction: ' + ', '.join(parts))
    return '\n'.join(lines) + '\n'


def detail_frame(result: ExperimentResult) -> pd.DataFrame:
    """Per-second errors and their running CRSE/CTE for every sequence."""
    rows = []
    scenario = result.summary.scenario
    for i, seq in enumerate(result.sequences):
        for method in METHODS:
            errors = seq.errors(method)
            cum = seq.cumulative(method)
            for k in range(len(errors)):
                rows.append({'scenario': scenario, 'sequence': i, 'segment': seq.segment, 'second': k + 1,
                             'method': method, 'error': float(errors[k]),
                             'crse_cum': float(cum['crse'][k]), 'cte_cum': float(cum['cte'][k])})
    return pd.DataFrame(rows, columns=DETAIL_COLUMNS)


def trajectory_geojson(result: ExperimentResult) -> dict:
    """FeatureCollection of truth/physical/corrected LineStrings per sequence."""
    features = []
    for i, (seq, res) in enumerate(zip(result.outages, result.sequences)):
        if seq.windows[0].fix_start is None:
            continue
        for track, fixes in reconstruct_trajectories(seq, res.predicted).items():
            features.append({
                'type': 'Feature',
                'properties': {'track': track, 'sequence': i, 'segment': seq.segment,
                               'scenario': result.summary.scenario, 'outage_s': seq.length_s,
                               'non_metric': track != 'truth'},
                'geometry': {'type': 'LineString', 'coordinates': [[f.lon, f.lat] for f in fixes]},
            })
    return {'type': 'FeatureCollection', 'features': features}


def write_geojson(result: ExperimentResult, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(trajectory_geojson(result), sort_keys=True, indent=2, separators=(',', ': ')) + '\n',
                    encoding='utf-8')
    log.info('wrote %s', path)
    return path


def write_report(results: Sequence[ExperimentResult], out_dir: str | Path) -> Dict[str, Path]:
    """Write summary.txt, metrics.csv, detail.csv and trajectories.geojson."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    summaries = [r.summary for r in results]
    paths = {'table': out / 'summary.txt', 'csv': out / 'metrics.csv',
             'detail': out / 'detail.csv', 'geojson': out / 'trajectories.geojson'}
    paths['table'].write_text(render_table(summaries), encoding='utf-8')
    write_csv(summaries, paths['csv'])
    detail = pd.concat([detail_frame(r) for r in results], ignore_index=True) if results \
        else pd.DataFrame(columns=DETAIL_COLUMNS)
    detail.to_csv(paths['detail'], index=False, lineterminator='\n')
    merged = {'type': 'FeatureCollection',
              'features': [f for r in results for f in trajectory_geojson(r)['features']]}
    paths['geojson'].write_text(json.dumps(merged, sort_keys=True, indent=2, separators=(',', ': ')) + '\n',
                                encoding='utf-8')
    return paths
