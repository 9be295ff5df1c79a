# commands/search.py
from core.globalmin import find_feasible
from core.scalarize import run_weights, seek_psd_weights, sweep
from utils.checks import parse_positive, parse_vector
from utils.instance_io import load_instance
from views.report_view import Report, sweep_report


def setup(subparsers):
    parser = subparsers.add_parser(
        "search", help="Dinkelbach-style search for Pareto points over weight vectors")
    parser.add_argument("instance", help="instance JSON file")
    parser.add_argument("--weights", help="one positive weight vector; default is a lattice sweep")
    parser.add_argument("--sweep", type=int, metavar="N", help="lattice divisions for the sweep")
    parser.add_argument("--x0", help="feasible starting point (default: a point of S near the box center)")
    parser.add_argument("--seek-psd-weights", action="store_true",
                        help="instead of searching, look for weights making F(w, x0) PSD")

    def run(args, cfg):
        p = load_instance(args.instance, cfg)
        x0 = parse_vector(args.x0, p.n, "--x0") if args.x0 else find_feasible(p, cfg.feas_tol)

        if args.seek_psd_weights:
            w = seek_psd_weights(p, x0, cfg)
            payload = {"point": x0.tolist(), "weights": None if w is None else w.tolist()}
            line = ("no candidate multiplier makes F(w, x*) PSD" if w is None
                    else f"F(w, x*) is PSD for w = {w.tolist()}")
            return Report(payload, line)

        if args.weights:
            entries = [run_weights(p, parse_positive(args.weights, p.m, "--weights"), x0, cfg)]
        else:
            entries = sweep(p, x0, cfg, args.sweep)
        return sweep_report(entries)

    parser.set_defaults(handler=run)
