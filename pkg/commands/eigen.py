# commands/eigen.py
from core.spectral import objective_eigen
from utils.instance_io import load_instance
from views.report_view import eigen_report


def setup(subparsers):
    parser = subparsers.add_parser(
        "eigen", help="Dump sorted eigendecompositions of every A_i and B_i as JSON")
    parser.add_argument("instance", help="instance JSON file")

    def run(args, cfg):
        p = load_instance(args.instance, cfg)
        return eigen_report(objective_eigen(p, cfg.jacobi_sweeps))

    parser.set_defaults(handler=run)
