# commands/oracle.py
from core.errors import ConfigError
from core.oracle import approximate_pareto_front, dominance_check, lipschitz_margin
from utils.checks import parse_vector
from utils.instance_io import load_instance
from views.report_view import dominance_report, front_report


def setup(subparsers):
    parser = subparsers.add_parser("oracle", help="Grid dominance check or approximate Pareto front")
    parser.add_argument("instance", help="instance JSON file")
    parser.add_argument("--step", type=float, required=True, help="lattice spacing")
    parser.add_argument("--point", help="query point for a dominance check")
    parser.add_argument("--front", action="store_true", help="list grid points no other grid point dominates")
    parser.add_argument("--weak", action="store_true", help="with --front: the weak Pareto front instead")
    parser.add_argument("--lipschitz-margin", action="store_true",
                        help="with --point: count a dominator only if it improves some ratio by more than "
                             "dom_tol + L*step*sqrt(n)")

    def run(args, cfg):
        if not args.point and not args.front:
            raise ConfigError("oracle needs --point or --front")
        p = load_instance(args.instance, cfg)
        if args.front:
            front = approximate_pareto_front(p, args.step, cfg.dom_tol, cfg.feas_tol, cfg.grid_cap,
                                             weak=args.weak)
            return front_report(front, args.weak)
        x = parse_vector(args.point, p.n, "--point")
        margin = None
        if args.lipschitz_margin:
            margin = lipschitz_margin(p, args.step, cfg.dom_tol, cfg.feas_tol, cfg.grid_cap)
        return dominance_report(dominance_check(p, x, args.step, cfg.dom_tol, cfg.feas_tol,
                                                cfg.grid_cap, cfg.threads, margin=margin))

    parser.set_defaults(handler=run)
