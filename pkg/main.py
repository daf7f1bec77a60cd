import argparse
import sys
from typing import List, Optional

from config import settings
from config.experiment import CONFIG_KEYS, TYPE_HINTS, parse_config
from src.channel import ber_awgn_bpsk, ber_rayleigh_bpsk, estimate_ber
from src.exceptions import ConfigError, SchemaError, SimulatorError
from src.models import ChannelConfig
from src.reporting import compare, format_comparison
from src.runner import ExperimentRunner, parse_sweep
from src.utils.logger import get_logger
from src.utils.seeding import derive_rng

logger = get_logger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2


def _flag(key: str) -> str:
    return '--' + key.replace('_', '-')


def _add_config_flags(parser: argparse.ArgumentParser):
    """Every ExperimentConfig key as a flag; values stay strings until parse_config coerces them"""
    for key in CONFIG_KEYS:
        if TYPE_HINTS[key] is bool:
            parser.add_argument(_flag(key), dest=key, action='store_const', const='true', default=None)
        else:
            parser.add_argument(_flag(key), dest=key, default=None, metavar=key.upper())


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='wlsim',
        description='Centralized, federated and split learning over a simulated Rayleigh/AWGN link',
        epilog=f"Defaults can be overridden with {settings.ENV_PREFIX}<NAME> environment variables.",
    )
    sub = parser.add_subparsers(dest='command', required=True)

    simulate = sub.add_parser('simulate', help='run one experiment (or a sweep) and write metrics CSV')
    simulate.add_argument('--config', dest='config_file', default=None, help='key=value config file')
    simulate.add_argument('--sweep', action='append', default=[], metavar='KEY=V1,V2,...',
                          help='repeatable; several keys form a cartesian product')
    _add_config_flags(simulate)

    replay = sub.add_parser('replay', help='re-run the config embedded in a metrics file')
    replay.add_argument('file')
    replay.add_argument('--out', default=None)

    comp = sub.add_parser('compare', help='per-scheme totals from metrics files')
    comp.add_argument('files', nargs='+')

    ber = sub.add_parser('ber', help='Monte Carlo bit error rate next to the closed form')
    ber.add_argument('--snr-db', type=float, default=settings.SNR_DB)
    ber.add_argument('--bits', type=int, default=1_000_000)
    ber.add_argument('--fading', choices=('none', 'rayleigh'), default='none')
    ber.add_argument('--fading-norm', type=float, default=settings.FADING_NORM)
    ber.add_argument('--block-bits', type=int, default=8, help='bits per fading block')
    ber.add_argument('--seed', type=int, default=settings.SEED)
    return parser


def cmd_simulate(args: argparse.Namespace) -> int:
    flags = {key: getattr(args, key) for key in CONFIG_KEYS}
    config = parse_config(flags, args.config_file)
    runner = ExperimentRunner()
    if args.sweep:
        runner.sweep(config, parse_sweep(args.sweep))
        return EXIT_OK
    return runner.run(config)


def cmd_replay(args: argparse.Namespace) -> int:
    return ExperimentRunner().replay(args.file, args.out)


def cmd_compare(args: argparse.Namespace) -> int:
    print(format_comparison(compare(args.files)))
    return EXIT_OK


def cmd_ber(args: argparse.Namespace) -> int:
    cfg = ChannelConfig(snr_db=args.snr_db, fading=args.fading, fading_norm=args.fading_norm, seed=args.seed)
    empirical = estimate_ber(cfg, args.bits, derive_rng(args.seed, 'ber'), block_bits=args.block_bits)
    if args.fading == 'none':
        theory = float(ber_awgn_bpsk(args.snr_db))
    else:
        theory = float(ber_rayleigh_bpsk(args.snr_db, args.fading_norm))
    print(f"snr_db={args.snr_db} fading={args.fading} bits={args.bits} "
          f"ber={empirical:.6e} theory={theory:.6e}")
    return EXIT_OK


COMMANDS = {
    'simulate': cmd_simulate,
    'replay': cmd_replay,
    'compare': cmd_compare,
    'ber': cmd_ber,
}


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (ConfigError, SchemaError) as e:
        logger.error(f"🛑 {e}")
        return EXIT_USAGE
    except (SimulatorError, OSError) as e:
        logger.error(f"🛑 {type(e).__name__}: {e}")
        return EXIT_FAILURE
    except KeyboardInterrupt:
        logger.info("🛑 Received Ctrl+C, stopping")
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
