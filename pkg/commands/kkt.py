# commands/kkt.py
from core.kkt import find_multipliers
from utils.checks import parse_positive, parse_vector
from utils.instance_io import load_instance
from views.report_view import multipliers_report


def setup(subparsers):
    parser = subparsers.add_parser(
        "kkt", help="Recover multipliers tau > 0, lambda >= 0 at a feasible point")
    parser.add_argument("instance", help="instance JSON file")
    parser.add_argument("--point", required=True, help='comma-separated x*, e.g. "0,1.5"')
    parser.add_argument("--tau-hint", help="direction for tau among all valid multipliers")

    def run(args, cfg):
        p = load_instance(args.instance, cfg)
        x = parse_vector(args.point, p.n, "--point")
        hint = parse_positive(args.tau_hint, p.m, "--tau-hint") if args.tau_hint else None
        res = find_multipliers(p, x, cfg.kkt_tol, cfg.strict_tol, cfg.feas_tol, reference=hint)
        return multipliers_report(x, res)

    parser.set_defaults(handler=run)
