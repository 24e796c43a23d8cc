#!/usr/bin/env python3
# Copyright 2026 The FFPDG Authors.
#
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
"""Builds the Adult and COMPAS CSVs under data/ from the raw public files.

Raw inputs (any one source):
  --raw-dir DIR   directory holding adult.data, adult.test and
                  compas-scores-two-years.csv
  --wheel FILE    a `responsibly` wheel (pip download responsibly --no-deps),
                  which ships the same three files

Adult keeps race (white vs non-white), sex, age and education years with the
income label; sex is the protected column (1 = male). The official
adult.data / adult.test split is used as train / test.

COMPAS applies the ProPublica row filter and keeps sex, race (Caucasian vs
not), age category, priors count bucketed as 0 / 1-3 / more than 3 and charge
degree with the two-year no-recidivism label; sex is the protected column
(1 = female). There is no official split, so a
seeded 70/30 split is written.
"""

import argparse
import csv
import io
import os
import random
import zipfile

ADULT_COLUMNS = ["age", "workclass", "fnlwgt", "education", "education_num",
                 "marital_status", "occupation", "relationship", "race", "sex",
                 "capital_gain", "capital_loss", "hours_per_week",
                 "native_country", "income"]

ADULT_SCHEMA = """\
# Adult census income, reduced to the four attributes used in the evaluation.
column = race:binary:feature
column = sex:binary:protected
column = age:continuous:feature
column = education_years:continuous:feature
column = income:binary:label
"""

COMPAS_SCHEMA = """\
# ProPublica COMPAS two-year recidivism, reduced to five attributes.
column = sex:binary:protected
column = race:binary:feature
column = age_cat:categorical:feature:lt25|25to45|gt45
column = priors:categorical:feature:0|1to3|gt3
column = charge_degree:binary:feature
column = no_recid:binary:label
"""


def read_sources(args):
  names = ["adult.data", "adult.test", "compas-scores-two-years.csv"]
  if args.raw_dir:
    out = {}
    for n in names:
      with open(os.path.join(args.raw_dir, n), "r", encoding="utf-8") as f:
        out[n] = f.read()
    return out
  with zipfile.ZipFile(args.wheel) as z:
    prefix = {"adult.data": "responsibly/dataset/adult/",
              "adult.test": "responsibly/dataset/adult/",
              "compas-scores-two-years.csv": "responsibly/dataset/compas/"}
    return {n: z.read(prefix[n] + n).decode("utf-8") for n in names}


def adult_rows(text):
  rows = []
  for line in text.splitlines():
    line = line.strip()
    if not line or line.startswith("|"):
      continue
    fields = [f.strip() for f in line.split(",")]
    if len(fields) != len(ADULT_COLUMNS):
      continue
    rec = dict(zip(ADULT_COLUMNS, fields))
    if "?" in (rec["race"], rec["sex"], rec["age"], rec["education_num"]):
      continue
    rows.append([
        1 if rec["race"] == "White" else 0,
        1 if rec["sex"] == "Male" else 0,
        int(rec["age"]),
        int(rec["education_num"]),
        1 if rec["income"].rstrip(".") == ">50K" else 0,
    ])
  return rows


def age_category(age):
  if age < 25:
    return "lt25"
  return "25to45" if age <= 45 else "gt45"


def priors_bucket(count):
  if count == 0:
    return "0"
  return "1to3" if count <= 3 else "gt3"


def compas_rows(text):
  rows = []
  for rec in csv.DictReader(io.StringIO(text)):
    try:
      days = int(rec["days_b_screening_arrest"])
    except ValueError:
      continue
    if not -30 <= days <= 30:
      continue
    if rec["is_recid"] == "-1" or rec["c_charge_degree"] == "O":
      continue
    if rec["score_text"] == "N/A":
      continue
    rows.append([
        1 if rec["sex"] == "Female" else 0,
        1 if rec["race"] == "Caucasian" else 0,
        age_category(int(rec["age"])),
        priors_bucket(int(rec["priors_count"])),
        1 if rec["c_charge_degree"] == "F" else 0,
        1 - int(rec["two_year_recid"]),
    ])
  return rows


def write_csv(path, header, rows):
  with open(path, "w", newline="", encoding="utf-8") as f:
    w = csv.writer(f, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)


def main():
  parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
  src = parser.add_mutually_exclusive_group(required=True)
  src.add_argument("--raw-dir")
  src.add_argument("--wheel")
  parser.add_argument("--out", default=os.path.join(
      os.path.dirname(os.path.abspath(__file__)), "..", "data"))
  parser.add_argument("--seed", type=int, default=0)
  args = parser.parse_args()

  raw = read_sources(args)
  os.makedirs(args.out, exist_ok=True)

  adult_header = ["race", "sex", "age", "education_years", "income"]
  write_csv(os.path.join(args.out, "adult_train.csv"), adult_header,
            adult_rows(raw["adult.data"]))
  write_csv(os.path.join(args.out, "adult_test.csv"), adult_header,
            adult_rows(raw["adult.test"]))
  with open(os.path.join(args.out, "adult.schema"), "w") as f:
    f.write(ADULT_SCHEMA)

  compas = compas_rows(raw["compas-scores-two-years.csv"])
  rng = random.Random(args.seed)
  order = list(range(len(compas)))
  rng.shuffle(order)
  cut = (7 * len(compas) + 9) // 10
  compas_header = ["sex", "race", "age_cat", "priors", "charge_degree",
                   "no_recid"]
  write_csv(os.path.join(args.out, "compas_train.csv"), compas_header,
            [compas[i] for i in order[:cut]])
  write_csv(os.path.join(args.out, "compas_test.csv"), compas_header,
            [compas[i] for i in order[cut:]])
  with open(os.path.join(args.out, "compas.schema"), "w") as f:
    f.write(COMPAS_SCHEMA)


if __name__ == "__main__":
  main()
