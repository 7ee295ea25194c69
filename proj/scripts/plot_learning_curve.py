#!/usr/bin/env python3
# Copyright 2026 The Ephemix Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Plot learning curves written by `ephemix train`."""

import argparse
import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import pandas as pd


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("curves", nargs="+", help="learning_curve_seed*.csv files")
    ap.add_argument("--out", default="learning_curve.png")
    ap.add_argument("--window", type=int, default=10, help="rolling mean width in episodes")
    args = ap.parse_args()

    fig, axes = plt.subplots(3, 1, figsize=(8, 9), sharex=True)
    for path in args.curves:
        df = pd.read_csv(path)
        roll = df.rolling(args.window, min_periods=1).mean()
        for ax, col in zip(axes, ["profit", "violation_min", "mean_loss"]):
            ax.plot(df["episode"], roll[col], label=path)
            ax.set_ylabel(col)
    axes[-1].set_xlabel("episode")
    axes[0].legend(fontsize="small")
    fig.tight_layout()
    fig.savefig(args.out, dpi=120)
    return 0


if __name__ == "__main__":
    sys.exit(main())
