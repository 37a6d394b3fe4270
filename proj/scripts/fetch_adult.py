#!/usr/bin/env python3
# Copyright 2026 The fairgan-tab Authors.
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     https://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Rebuilds data/adult.csv from the UCI Adult train+test files.

The raw files are taken from the `responsibly` wheel, which ships an
unmodified copy of adult.data and adult.test. Rows are kept verbatim
(including '?' missing markers); only whitespace and the trailing '.' on
test-set labels are normalized.
"""
import argparse
import pathlib
import subprocess
import sys
import tempfile
import zipfile

HEADER = ("age,workclass,fnlwgt,education,education-num,marital-status,"
          "occupation,relationship,race,sex,capital-gain,capital-loss,"
          "hours-per-week,native-country,income")


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default=str(pathlib.Path(__file__).parent.parent / "data" / "adult.csv"))
    args = ap.parse_args()
    with tempfile.TemporaryDirectory() as tmp:
        subprocess.check_call([sys.executable, "-m", "pip", "download", "--no-deps",
                               "responsibly==0.1.2", "-d", tmp])
        wheel = next(pathlib.Path(tmp).glob("responsibly-*.whl"))
        z = zipfile.ZipFile(wheel)
        lines = [HEADER]
        for name in ("adult.data", "adult.test"):
            for line in z.read(f"responsibly/dataset/adult/{name}").decode().splitlines():
                if not line.strip() or line.startswith("|"):
                    continue
                cells = [c.strip() for c in line.split(",")]
                cells[-1] = cells[-1].rstrip(".")
                lines.append(",".join(cells))
    pathlib.Path(args.out).write_text("\n".join(lines) + "\n")
    print(f"wrote {len(lines) - 1} rows to {args.out}")


if __name__ == "__main__":
    main()
