# commands/certify.py
from core.certify import certify_point
from core.spectral import objective_eigen
from utils.checks import parse_positive, parse_vector
from utils.config import ROUTES
from utils.instance_io import load_instance
from views.report_view import certificate_report, eigen_payload


def setup(subparsers):
    parser = subparsers.add_parser("certify", help="Run the Pareto optimality test at a point")
    parser.add_argument("instance", help="instance JSON file")
    parser.add_argument("--point", required=True, help='comma-separated x*')
    parser.add_argument("--route", choices=sorted(ROUTES), help="route to try (default: config route)")
    parser.add_argument("--tol", type=float, help="tolerance for the route inequalities (z_tol)")
    parser.add_argument("--tau", help="use this tau > 0 instead of the LP multipliers")
    parser.add_argument("--tau-hint", help="pick the valid tau closest to this direction")
    parser.add_argument("--dump-eigen", action="store_true",
                        help="include the eigendecompositions of every A_i and B_i")

    def run(args, cfg):
        cfg = cfg.with_overrides(route=args.route, z_tol=args.tol)
        p = load_instance(args.instance, cfg)
        x = parse_vector(args.point, p.n, "--point")
        tau = parse_positive(args.tau, p.m, "--tau") if args.tau else None
        hint = parse_positive(args.tau_hint, p.m, "--tau-hint") if args.tau_hint else None
        report = certificate_report(certify_point(p, x, cfg, tau=tau, tau_hint=hint))
        if args.dump_eigen:
            report.payload["eigen"] = eigen_payload(objective_eigen(p, cfg.jacobi_sweeps))
        return report

    parser.set_defaults(handler=run)
