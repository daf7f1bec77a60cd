import itertools
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from config.experiment import ExperimentConfig, coerce_values
from src.exceptions import ConfigError
from src.models import RoundReport
from src.protocols import cl_train, fl_train, sl_train
from src.protocols.training import resolve_workers
from src.reporting import MetricsWriter, read_config
from src.utils.logger import get_logger

logger = get_logger(__name__)

SchemeTrainer = Callable[[ExperimentConfig], List[RoundReport]]


def parse_sweep(items: Sequence[str]) -> List[Tuple[str, List[str]]]:
    """['snr_db=0,5,10', 'quant_bits=4,8'] → [('snr_db', ['0', '5', '10']), ('quant_bits', ['4', '8'])]"""
    axes = []
    for item in items:
        if '=' not in item:
            raise ConfigError('sweep', f"expected key=v1,v2,..., got {item!r}")
        key, values = (part.strip() for part in item.split('=', 1))
        points = [v.strip() for v in values.split(',') if v.strip()]
        if not points:
            raise ConfigError(key, "sweep has no values")
        coerce_values({key: points[0]})
        axes.append((key, points))
    return axes


def sweep_path(out: str, point: Sequence[Tuple[str, str]]) -> str:
    """metrics.csv + [('snr_db', '5')] → metrics_snr_db=5.csv"""
    path = Path(out)
    suffix = ''.join(f"_{key}={value}" for key, value in point)
    return str(path.with_name(f"{path.stem}{suffix}{path.suffix}"))


class ExperimentRunner:
    """
    Runs experiments by scheme name:
    - single runs and cartesian sweeps
    - replay of the config embedded in a metrics file
    """

    def __init__(self):
        self.schemes: Dict[str, SchemeTrainer] = {}
        self._initialize_schemes()

    def _initialize_schemes(self):
        self.schemes['cl'] = cl_train
        self.schemes['fl'] = fl_train
        self.schemes['sl'] = sl_train

    def execute(self, config: ExperimentConfig) -> List[RoundReport]:
        trainer = self.schemes.get(config.scheme)
        if trainer is None:
            raise ConfigError('scheme', f"no trainer registered for {config.scheme!r}")
        logger.info(f"▶️ Running {config.scheme.upper()} (seed {config.seed}, "
                    f"{resolve_workers(config)} worker(s)) → {config.out}")
        return trainer(config)

    def run(self, config: ExperimentConfig) -> int:
        """Execute and persist; returns the process exit code"""
        reports = self.execute(config)
        MetricsWriter(config.out).write(reports, config)
        final = reports[-1]
        logger.info(f"✅ {config.scheme.upper()} done: accuracy {final.test_accuracy:.4f}, "
                    f"{sum(r.total_bits for r in reports)} bits")
        return 0

    def sweep(self, config: ExperimentConfig, axes: Sequence[Tuple[str, List[str]]]) -> List[str]:
        """One run and one metrics file per point of the cartesian product"""
        written = []
        keys = [key for key, _ in axes]
        for values in itertools.product(*(points for _, points in axes)):
            point = list(zip(keys, values))
            out = sweep_path(config.out, point)
            changes = coerce_values(dict(point))
            self.run(config.replace(**changes, out=out))
            written.append(out)
        logger.info(f"✅ Sweep finished: {len(written)} metrics files")
        return written

    def replay(self, metrics_file: str, out: Optional[str] = None) -> int:
        config = read_config(metrics_file)
        if out is not None:
            config = config.replace(out=out)
        logger.info(f"🔁 Replaying {metrics_file}")
        return self.run(config)
