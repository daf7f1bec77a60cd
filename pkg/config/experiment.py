import dataclasses
import math
import typing
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Any, Dict, Mapping, Optional, Union

from config import settings
from src.exceptions import ConfigError
from src.models import FADING_MODES, FADING_NORMS, VALID_BIT_WIDTHS, ChannelConfig

SCHEMES = ('cl', 'fl', 'sl')
DOWNLINK_MODES = ('error_free', 'impaired')
ENERGY_PRICING = ('per_block', 'mean')
DATASET_LAYOUTS = ('sentiment140', 'simple')
PRESETS = ('standard', 'text')
CUT_INDICES = (1, 2, 3)
# Where results go does not change them; replays pick their own output path
HEADER_EXCLUDED = ('out',)
SCHEME_DEPENDENT = ('users', 'cycles', 'local_epochs')


def scheme_defaults(scheme: str, preset: str) -> Dict[str, int]:
    """users / cycles / local_epochs a scheme gets when they are left unset"""
    defaults = dict(settings.SCHEME_DEFAULTS[scheme])
    if scheme == 'fl' and preset == 'text':
        defaults['cycles'] = settings.TEXT_PRESET_FL_CYCLES
    return defaults


@dataclass(frozen=True)
class ExperimentConfig:
    """One fully resolved experiment. Scheme-dependent fields resolve on construction."""

    scheme: str = 'fl'
    users: Optional[int] = None
    cycles: Optional[int] = None
    local_epochs: Optional[int] = None
    quant_bits: int = settings.QUANT_BITS
    snr_db: float = settings.SNR_DB
    fading: str = settings.FADING
    fading_norm: float = settings.FADING_NORM
    bandwidth_hz: float = settings.BANDWIDTH_HZ
    power_w: float = settings.POWER_W
    batch_size: int = settings.BATCH_SIZE
    lr: float = settings.LEARNING_RATE
    momentum: float = settings.MOMENTUM
    clip: float = settings.CLIP_THRESHOLD
    l2: float = settings.L2_COEFFICIENT
    lr_decay: float = settings.LR_DECAY
    lr_step_epochs: int = settings.LR_STEP_EPOCHS
    dataset: str = 'synthetic'
    dataset_layout: str = 'sentiment140'
    max_records: Optional[int] = None
    synthetic_records: int = settings.SYNTHETIC_RECORDS
    label_noise: float = settings.LABEL_NOISE
    test_fraction: float = settings.TEST_FRACTION
    seed: int = settings.SEED
    out: str = 'metrics.csv'
    sl_cycle_fraction: float = settings.SL_CYCLE_FRACTION
    sl_transport_bits: int = settings.SL_TRANSPORT_BITS
    identity_transport: bool = False
    cut_index: int = settings.SPLIT_CUT_INDEX
    downlink: str = 'error_free'
    energy_pricing: str = 'per_block'
    joules_per_flop: float = settings.JOULES_PER_FLOP
    grams_per_joule: float = settings.GRAMS_CO2_PER_JOULE
    privacy: bool = False
    privacy_samples: int = settings.PRIVACY_SAMPLES
    privacy_epochs: int = settings.PRIVACY_EPOCHS
    privacy_batch_size: int = settings.PRIVACY_BATCH_SIZE
    workers: int = 1
    preset: str = 'standard'
    checkpoint: Optional[str] = None

    def __post_init__(self):
        _require(self.scheme in SCHEMES, 'scheme', f"must be one of {SCHEMES}")
        _require(self.preset in PRESETS, 'preset', f"must be one of {PRESETS}")

        # Scheme-specific defaults for anything left unset
        for key, value in scheme_defaults(self.scheme, self.preset).items():
            if getattr(self, key) is None:
                object.__setattr__(self, key, value)

        _require(self.users >= 1, 'users', "must be >= 1")
        _require(self.cycles >= 1, 'cycles', "must be >= 1")
        _require(self.local_epochs >= 1, 'local_epochs', "must be >= 1")
        _require(self.quant_bits in VALID_BIT_WIDTHS, 'quant_bits', f"must be one of {VALID_BIT_WIDTHS}")
        _require(self.sl_transport_bits in VALID_BIT_WIDTHS, 'sl_transport_bits',
                 f"must be one of {VALID_BIT_WIDTHS}")
        _require(self.fading in FADING_MODES, 'fading', f"must be one of {FADING_MODES}")
        _require(self.fading_norm in FADING_NORMS, 'fading_norm', f"must be one of {FADING_NORMS}")
        _require(not math.isnan(self.snr_db) and self.snr_db != -math.inf, 'snr_db', "must be a number or inf")
        _require(self.bandwidth_hz > 0, 'bandwidth_hz', "must be > 0")
        _require(self.power_w > 0, 'power_w', "must be > 0")
        _require(self.batch_size >= 1, 'batch_size', "must be >= 1")
        _require(self.lr > 0, 'lr', "must be > 0")
        _require(0 <= self.momentum < 1, 'momentum', "must satisfy 0 <= momentum < 1")
        _require(self.clip > 0, 'clip', "must be > 0")
        _require(self.l2 >= 0, 'l2', "must be >= 0")
        _require(0 < self.lr_decay <= 1, 'lr_decay', "must be in (0, 1]")
        _require(self.lr_step_epochs >= 1, 'lr_step_epochs', "must be >= 1")
        _require(self.dataset_layout in DATASET_LAYOUTS, 'dataset_layout', f"must be one of {DATASET_LAYOUTS}")
        _require(self.max_records is None or self.max_records >= 1, 'max_records', "must be >= 1")
        _require(self.synthetic_records >= 1, 'synthetic_records', "must be >= 1")
        _require(0 <= self.label_noise < 0.5, 'label_noise', "must be in [0, 0.5)")
        _require(0 < self.test_fraction < 1, 'test_fraction', "must be in (0, 1)")
        _require(0 < self.sl_cycle_fraction <= 1, 'sl_cycle_fraction', "must be in (0, 1]")
        _require(self.cut_index in CUT_INDICES, 'cut_index', f"must be one of {CUT_INDICES}")
        _require(self.downlink in DOWNLINK_MODES, 'downlink', f"must be one of {DOWNLINK_MODES}")
        _require(self.energy_pricing in ENERGY_PRICING, 'energy_pricing', f"must be one of {ENERGY_PRICING}")
        _require(self.joules_per_flop >= 0, 'joules_per_flop', "must be >= 0")
        _require(self.grams_per_joule >= 0, 'grams_per_joule', "must be >= 0")
        _require(self.privacy_samples >= 10, 'privacy_samples', "must be >= 10")
        _require(self.privacy_epochs >= 1, 'privacy_epochs', "must be >= 1")
        _require(self.privacy_batch_size >= 1, 'privacy_batch_size', "must be >= 1")
        _require(self.workers >= 0, 'workers', "must be >= 0 (0 = one per physical core)")

    @property
    def channel(self) -> ChannelConfig:
        return ChannelConfig(
            snr_db=self.snr_db,
            bandwidth_hz=self.bandwidth_hz,
            power_w=self.power_w,
            fading=self.fading,
            fading_norm=self.fading_norm,
            seed=self.seed,
        )

    def replace(self, **changes: Any) -> 'ExperimentConfig':
        """
        dataclasses.replace that re-resolves users / cycles / local_epochs when the
        scheme or preset changes, unless they differ from the old scheme's defaults
        (explicitly chosen) or are part of `changes`
        """
        scheme = changes.get('scheme', self.scheme)
        preset = changes.get('preset', self.preset)
        if (scheme, preset) != (self.scheme, self.preset):
            resolved = scheme_defaults(self.scheme, self.preset)
            for key in SCHEME_DEPENDENT:
                if key not in changes and getattr(self, key) == resolved[key]:
                    changes[key] = None
        return dataclasses.replace(self, **changes)

    def to_header(self) -> str:
        """Single-line key=value;... form embedded in metrics files"""
        return ';'.join(f"{f.name}={_format_value(getattr(self, f.name))}" for f in fields(self)
                        if f.name not in HEADER_EXCLUDED)

    @classmethod
    def from_header(cls, header: str) -> 'ExperimentConfig':
        pairs = dict(item.split('=', 1) for item in header.strip().split(';') if item)
        return cls(**coerce_values(pairs))


def _require(condition: bool, key: str, message: str):
    if not condition:
        raise ConfigError(key, message)


def _format_value(value: Any) -> str:
    if value is None:
        return 'none'
    if isinstance(value, bool):
        return 'true' if value else 'false'
    return str(value)


TYPE_HINTS = typing.get_type_hints(ExperimentConfig)
CONFIG_KEYS = tuple(f.name for f in fields(ExperimentConfig))


def _convert(key: str, raw: Any) -> Any:
    hint = TYPE_HINTS[key]
    optional = typing.get_origin(hint) is Union and type(None) in typing.get_args(hint)
    if optional:
        hint = next(a for a in typing.get_args(hint) if a is not type(None))
    if not isinstance(raw, str):
        return raw
    text = raw.strip()
    if optional and text.lower() in ('', 'none', 'null'):
        return None
    try:
        if hint is bool:
            lowered = text.lower()
            if lowered in ('1', 'true', 'yes', 'on'):
                return True
            if lowered in ('0', 'false', 'no', 'off'):
                return False
            raise ValueError(text)
        if hint is int:
            return int(text)
        if hint is float:
            return float(text)
        return text
    except ValueError:
        raise ConfigError(key, f"invalid value {raw!r} (expected {hint.__name__})") from None


def coerce_values(values: Mapping[str, Any]) -> Dict[str, Any]:
    """Validate keys and convert string values to field types"""
    out = {}
    for key, raw in values.items():
        if key not in CONFIG_KEYS:
            raise ConfigError(key, "unknown key")
        out[key] = _convert(key, raw)
    return out


def read_config_file(path: Union[str, Path]) -> Dict[str, str]:
    """Plain-text key=value file; '#' starts a comment"""
    values: Dict[str, str] = {}
    for lineno, line in enumerate(Path(path).read_text(encoding='utf-8').splitlines(), start=1):
        line = line.split('#', 1)[0].strip()
        if not line:
            continue
        if '=' not in line:
            raise ConfigError(f"line {lineno}", f"expected key=value, got {line!r}")
        key, value = (part.strip() for part in line.split('=', 1))
        values[key] = value
    coerce_values(values)
    return values


def parse_config(args: Optional[Mapping[str, Any]] = None,
                 file: Optional[Union[str, Path]] = None) -> ExperimentConfig:
    """Resolve defaults < config file < flags (flags set to None are ignored)"""
    merged: Dict[str, Any] = {}
    if file is not None:
        merged.update(read_config_file(file))
    if args:
        merged.update({k: v for k, v in args.items() if v is not None})
    return ExperimentConfig(**coerce_values(merged))
