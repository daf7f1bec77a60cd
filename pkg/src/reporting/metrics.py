"""
Metrics file layout (UTF-8, LF line endings):

    # schema: wlsim-metrics/v1
    # config: <ExperimentConfig.to_header()>
    scheme,seed,cycle,...            one row per cycle, then a row with cycle=summary
"""
from pathlib import Path
from typing import Sequence, Tuple, Union

import pandas as pd

from config import settings
from config.experiment import ExperimentConfig
from src.exceptions import SchemaError
from src.models import RoundReport
from src.utils.logger import get_logger

logger = get_logger(__name__)

METRIC_COLUMNS = [
    'scheme', 'seed', 'cycle', 'snr_db', 'quant_bits', 'users', 'accuracy', 'loss', 'uplink_bits',
    'downlink_bits', 'comm_energy_j', 'compute_energy_j', 'co2_g', 'recon_error',
]
SUMMARY = 'summary'
SCHEMA_PREFIX = '# schema: '
CONFIG_PREFIX = '# config: '
FLOAT_FORMAT = '%.10g'

COMPARISON_COLUMNS = ['scheme', 'total_bits', 'final_accuracy', 'recon_error', 'compute_energy_j',
                      'comm_energy_j', 'total_energy_j']


def reports_to_frame(reports: Sequence[RoundReport], cfg: ExperimentConfig) -> pd.DataFrame:
    """One row per cycle plus the summary row (totals; accuracy, loss and recon error from the last cycle)"""
    rows = [{
        'scheme': r.scheme,
        'seed': cfg.seed,
        'cycle': str(r.cycle),
        'snr_db': cfg.snr_db,
        'quant_bits': cfg.quant_bits,
        'users': r.users,
        'accuracy': r.test_accuracy,
        'loss': r.train_loss,
        'uplink_bits': r.uplink_bits,
        'downlink_bits': r.downlink_bits,
        'comm_energy_j': r.comm_energy_j,
        'compute_energy_j': r.compute_energy_j,
        'co2_g': r.co2_g,
        'recon_error': r.recon_error,
    } for r in reports]
    frame = pd.DataFrame(rows, columns=METRIC_COLUMNS)
    if frame.empty:
        return frame
    last = frame.iloc[-1]
    summary = {
        **{c: last[c] for c in ('scheme', 'seed', 'snr_db', 'quant_bits', 'users', 'accuracy', 'loss',
                                'recon_error')},
        'cycle': SUMMARY,
        **{c: frame[c].sum() for c in ('uplink_bits', 'downlink_bits', 'comm_energy_j', 'compute_energy_j',
                                       'co2_g')},
    }
    return pd.concat([frame, pd.DataFrame([summary], columns=METRIC_COLUMNS)], ignore_index=True)


class MetricsWriter:
    """Persists one run's reports as a versioned CSV with the resolved config in its header"""

    def __init__(self, path: Union[str, Path]):
        self.path = Path(path)

    def write(self, reports: Sequence[RoundReport], cfg: ExperimentConfig) -> Path:
        frame = reports_to_frame(reports, cfg)
        body = frame.to_csv(index=False, lineterminator='\n', float_format=FLOAT_FORMAT, na_rep='nan')
        if self.path.parent != Path(''):
            self.path.parent.mkdir(parents=True, exist_ok=True)
        with open(self.path, 'w', encoding='utf-8', newline='') as f:
            f.write(f"{SCHEMA_PREFIX}{settings.METRICS_SCHEMA_VERSION}\n")
            f.write(f"{CONFIG_PREFIX}{cfg.to_header()}\n")
            f.write(body)
        logger.info(f"💾 Wrote {len(reports)} cycle rows + summary to {self.path}")
        return self.path


def read_metrics(path: Union[str, Path]) -> Tuple[str, pd.DataFrame]:
    """Returns (config header, table); rejects other schema versions and missing columns"""
    with open(path, encoding='utf-8') as f:
        schema_line = f.readline().rstrip('\n')
        config_line = f.readline().rstrip('\n')
    if not schema_line.startswith(SCHEMA_PREFIX):
        raise SchemaError('schema', f"{path}: first line is not a schema header")
    version = schema_line[len(SCHEMA_PREFIX):]
    if version != settings.METRICS_SCHEMA_VERSION:
        raise SchemaError('schema', f"{path}: unsupported version {version!r}")
    if not config_line.startswith(CONFIG_PREFIX):
        raise SchemaError('config', f"{path}: second line is not a config header")
    frame = pd.read_csv(path, skiprows=2, dtype={'cycle': str, 'scheme': str})
    for column in METRIC_COLUMNS:
        if column not in frame.columns:
            raise SchemaError(column, f"{path}: missing column")
    return config_line[len(CONFIG_PREFIX):], frame


def read_config(path: Union[str, Path]) -> ExperimentConfig:
    header, _ = read_metrics(path)
    return ExperimentConfig.from_header(header)


def _file_totals(path: Union[str, Path]) -> dict:
    _, frame = read_metrics(path)
    cycles = frame[frame['cycle'] != SUMMARY]
    if cycles.empty:
        raise SchemaError('cycle', f"{path}: no cycle rows")
    compute = float(cycles['compute_energy_j'].sum())
    comm = float(cycles['comm_energy_j'].sum())
    return {
        'scheme': str(cycles['scheme'].iloc[-1]),
        'total_bits': int(cycles['uplink_bits'].sum() + cycles['downlink_bits'].sum()),
        'final_accuracy': float(cycles['accuracy'].iloc[-1]),
        'recon_error': float(cycles['recon_error'].iloc[-1]),
        'compute_energy_j': compute,
        'comm_energy_j': comm,
        'total_energy_j': compute + comm,
    }


def compare(paths: Sequence[Union[str, Path]]) -> pd.DataFrame:
    """
    One row per scheme: mean of each file's totals (bits, final accuracy, recon
    error, energies) across the files given, usually one per seed, with the
    population standard deviation in <column>_std and the file count in `runs`
    """
    if not paths:
        raise SchemaError('files', "compare needs at least one metrics file")
    per_file = pd.DataFrame([_file_totals(path) for path in paths], columns=COMPARISON_COLUMNS)
    metrics = COMPARISON_COLUMNS[1:]
    grouped = per_file.groupby('scheme', sort=False)
    table = grouped[metrics].mean()
    spread = grouped[metrics].std(ddof=0).add_suffix('_std')
    table = table.join(spread)
    table.insert(0, 'runs', grouped.size())
    ordered = ['runs'] + [c for m in metrics for c in (m, f'{m}_std')]
    return table[ordered].reset_index()


def format_comparison(table: pd.DataFrame) -> str:
    return table.to_string(index=False, float_format=lambda v: f"{v:.6g}")
