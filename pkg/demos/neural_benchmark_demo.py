#!/usr/bin/env python3
"""Train the 10 s heading network and benchmark it against the classics.

Runs in roughly a minute.  Bump EPOCHS to 50 for the full desk-scale
result; the qualitative outcome is the same.
"""

import time

from headalign.harness import evaluate
from headalign.nn.data import make_windows
from headalign.nn.model import build_headingnet, parameter_count
from headalign.nn.train import default_train_config, train
from headalign.simulate import DEFAULT_SENSORS, scenario_bank, simulate_recording

EPOCHS = 12
SEED = 42


def main():
    t0 = time.monotonic()

    # five synthetic moorings; the first four lend their tail segments
    # to evaluation, so training never sees them
    bank = scenario_bank(SEED, duration=420.0)
    recs = [simulate_recording(cfg, DEFAULT_SENSORS) for cfg in bank]
    train_recs = [r.slice_window(0.0, 300.0 - 1e-6) for r in recs[:4]] + [recs[4]]
    eval_recs = [r.slice_window(300.0, 420.0) for r in recs[:4]]

    windows = make_windows(train_recs, 10.0, "train", seed=SEED)
    print(f"training windows: {len(windows)}")

    model = build_headingnet(10, seed=SEED)
    print(f"model parameters: {parameter_count(model)}")

    cfg = default_train_config(10, seed=SEED, epochs=EPOCHS)
    model, history = train(model, windows, cfg)
    for epoch, lr, loss in history:
        if epoch % 3 == 0 or epoch == EPOCHS - 1:
            print(f"  epoch {epoch:>3}  lr {lr:.2e}  loss {loss:10.4f}")

    report = evaluate(
        eval_recs,
        ["I-DVA", "A-DVA", "I-OBA", "A-OBA", "HeadingNet10"],
        [10.0],
        models={10: model.eval()},
    )
    print()
    print("mean AE (deg) over the held-out segments, 10 s alignment:")
    for avg in sorted(report.averages, key=lambda a: a["mean_ae_deg"]):
        print(f"  {avg['method']:<13} {avg['mean_ae_deg']:8.3f}")
    imp = report.improvements[0]
    print(
        f"\nneural vs best classical ({imp['best_baseline_name']}): "
        f"{imp['improvement_pct']:.1f}% improvement"
    )
    print(f"total time: {time.monotonic() - t0:.0f} s")


if __name__ == "__main__":
    main()
