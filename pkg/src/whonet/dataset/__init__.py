from .io import SchemaConfig, export_csv, ingest_csv, load_schema, split_segments
from .normalize import NormalizerParams, apply_normalizer, fit_normalizer, unapply_normalizer
from .synthetic import PRESETS, SlipEvent, SpeedSegment, SyntheticConfig, YawSegment, generate_synthetic, preset_config
from .windows import OUTAGE_LENGTHS, build_corpus, build_windows, split_outage_sequences

__all__ = [
    'SchemaConfig', 'export_csv', 'ingest_csv', 'load_schema', 'split_segments',
    'NormalizerParams', 'apply_normalizer', 'fit_normalizer', 'unapply_normalizer',
    'PRESETS', 'SlipEvent', 'SpeedSegment', 'SyntheticConfig', 'YawSegment',
    'generate_synthetic', 'preset_config',
    'OUTAGE_LENGTHS', 'build_corpus', 'build_windows', 'split_outage_sequences',
]
