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
"""Aggregate comparison.csv files from several `ephemix compare` runs.

Prints mean and standard deviation per policy, plus how many runs the agent
beat both baselines on profit and violation minutes.
"""

import argparse
import sys

import pandas as pd


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("tables", nargs="+", help="comparison.csv files, one per run")
    args = ap.parse_args()

    frames = []
    wins = 0
    for i, path in enumerate(args.tables):
        df = pd.read_csv(path).set_index("policy")
        base = df.drop(index="agent")
        agent = df.loc["agent"]
        if agent.profit > base.profit.max() and agent.violation_min < base.violation_min.min():
            wins += 1
        frames.append(df.assign(run=i).reset_index())

    all_runs = pd.concat(frames)
    cols = ["profit", "violation_min", "ephem_unit_hours", "stable_pct"]
    print(all_runs.groupby("policy")[cols].agg(["mean", "std"]).to_string())
    print(f"\nagent beats both baselines in {wins}/{len(args.tables)} runs")
    return 0


if __name__ == "__main__":
    sys.exit(main())
