"""Plot plot_data.json written by `accel compare` (needs matplotlib)."""
import argparse
import json
from pathlib import Path


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("plot_data", type=Path)
    ap.add_argument("--out", type=Path, default=None)
    args = ap.parse_args()
    try:
        import matplotlib
        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError:
        raise SystemExit("matplotlib is not installed; pip install matplotlib")
    data = json.loads(args.plot_data.read_text())
    fig, ax = plt.subplots(figsize=(6, 4))
    for label, ys in data["series"].items():
        pts = [(t, y) for t, y in enumerate(ys) if y is not None]
        ax.plot([p[0] for p in pts], [p[1] for p in pts], label=label)
    ax.set_xlabel(data["x_label"])
    ax.set_ylabel(data["y_label"])
    ax.legend()
    out = args.out or args.plot_data.with_suffix(".png")
    fig.savefig(out, dpi=120, bbox_inches="tight")
    print(f"wrote {out}")


if __name__ == "__main__":
    main()
