# Levinson/cli.py

import argparse
import sys
from typing import List, Optional

from Levinson.client import LevinsonClient
from Levinson.config.loader import load_config
from Levinson.exception import ConfigurationError, DomainError, LevinsonException
from Levinson.logger import get_logger

logger = get_logger(__name__)

EXIT_OK = 0
EXIT_TOLERANCE = 2
EXIT_CONFIG = 3

COMMANDS = {
    "levinson": ("levinson", "run_levinson"),
    "curves": ("curves", "run_curves"),
    "resonance-scan": ("resonance_scan", "run_resonance_scan"),
    "flow-suite": ("flow_suite", "run_flow_suite"),
    "bk-check": ("bk_check", "run_bk_check"),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="levinson",
        description="Levinson theorem, spectral shift and spectral flow checks for radial potentials",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name, formatter_class=argparse.ArgumentDefaultsHelpFormatter)
        p.add_argument("--config", default=None, help="KEY=VALUE run configuration file")
        p.add_argument("--out", default="./output", help="Output directory")
        p.add_argument("--seed", type=int, default=0, help="First seed of the random flow suite")
        p.add_argument("--threads", type=int, default=1, help="Worker threads")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    mode, runner = COMMANDS[args.command]
    try:
        cfg = load_config(args.config, mode=mode, seed=args.seed, threads=args.threads)
        client = LevinsonClient(cfg, output_dir=args.out)
        result = getattr(client, runner)(cfg)
    except (ConfigurationError, DomainError) as e:
        logger.error(f"Configuration error: {e}")
        return EXIT_CONFIG
    except LevinsonException as e:
        logger.error(f"Numerical tolerance failure: {e}")
        return EXIT_TOLERANCE

    passed = getattr(result, "passed", True)
    if not passed:
        logger.error(f"{args.command} finished outside tolerance; see {args.out}")
        return EXIT_TOLERANCE
    logger.info(f"{args.command} finished; outputs in {args.out}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
