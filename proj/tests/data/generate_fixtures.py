#!/usr/bin/env python3
# Copyright 2026 The cellrec Authors
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

"""Regenerates the notebook fixtures under tests/data. Output is deterministic."""
import hashlib
import json
import os

HERE = os.path.dirname(os.path.abspath(__file__))


def cell(kind, source, as_list=True):
    c = {"cell_type": kind, "metadata": {}, "source": source.splitlines(keepends=True) if as_list else source}
    if kind == "code":
        c["execution_count"] = None
        c["outputs"] = [{"output_type": "stream", "name": "stdout", "text": ["ignored output\n"]}]
    return c


def notebook(cells):
    return {"cells": cells, "metadata": {"kernelspec": {"name": "python3"}}, "nbformat": 4, "nbformat_minor": 5}


def write(path, obj):
    os.makedirs(os.path.dirname(path), exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(obj, f, indent=1, ensure_ascii=False)
        f.write("\n")


def write_manifest(path, rows):
    with open(path, "w", encoding="utf-8") as f:
        f.write("path,rank\n")
        for p, r in rows:
            f.write(f"{p},{r}\n")


def nbformat_cases():
    d = os.path.join(HERE, "nbformat")
    write(os.path.join(d, "multi_markdown.ipynb"), notebook([
        cell("markdown", "# Exploring prices"),
        cell("markdown", "Prices are skewed, so\nwe look at a log scale."),
        cell("code", "import numpy as np\nlog_price = np.log(df.price)"),
        cell("code", "log_price.describe()"),
        cell("markdown", "Distribution of the log price"),
        cell("code", "plt.hist(log_price, bins=40)\nplt.show()"),
    ]))
    write(os.path.join(d, "leading_code.ipynb"), notebook([
        cell("code", "import pandas as pd"),
        cell("markdown", "Read the training split"),
        cell("code", "train = pd.read_csv('train.csv')", as_list=False),
    ]))
    write(os.path.join(d, "dangling_markdown.ipynb"), notebook([
        cell("markdown", "Fit a baseline"),
        cell("code", "model.fit(X, y)"),
        cell("markdown", "## Conclusions\nThe baseline is strong."),
    ]))
    write(os.path.join(d, "raw_breaks_run.ipynb"), notebook([
        cell("markdown", "This note is cut off by a raw cell"),
        cell("raw", "%%raw\nnot code"),
        cell("code", "print('orphan')"),
        cell("markdown", "Blank cells inside a run are skipped"),
        cell("markdown", "   \n"),
        cell("markdown", "Scatter of the residuals"),
        cell("code", "plt.scatter(pred, resid)"),
        cell("markdown", "An empty code cell ends the run"),
        cell("code", "\n"),
        cell("code", "print('after blank')"),
    ]))
    write(os.path.join(d, "code_only.ipynb"), notebook([cell("code", "x = 1")]))
    with open(os.path.join(d, "malformed_empty_object.ipynb"), "w") as f:
        f.write("{}\n")
    with open(os.path.join(d, "malformed_not_json.ipynb"), "w") as f:
        f.write("this is not a notebook\n")


def small_corpus():
    d = os.path.join(HERE, "corpus")
    write(os.path.join(d, "notebooks", "alpha.ipynb"), notebook([
        cell("markdown", "# Load the housing table"),
        cell("code", "import pandas as pd\ndf = pd.read_csv('housing.csv')"),
        cell("markdown", "Scatter plot of price against area"),
        cell("code", "plt.scatter(df.area, df.price)\nplt.xlabel('area')\nplt.show()"),
    ]))
    write(os.path.join(d, "notebooks", "beta.ipynb"), notebook([
        cell("code", "import matplotlib.pyplot as plt"),
        cell("markdown", "Histogram of ages"),
        cell("markdown", "Bin width of five years"),
        cell("code", "plt.hist(df.age, bins=20)"),
        cell("raw", "raw cell"),
        cell("code", "print('done')"),
    ]))
    write(os.path.join(d, "notebooks", "gamma.ipynb"), notebook([
        cell("markdown", "Sales share by region as a pie"),
        cell("code", "fig, ax = plt.subplots()\nax.pie(shares, labels=regions)"),
        cell("markdown", "Bar chart of revenue per quarter"),
        cell("code", "ax.bar(quarters, revenue)"),
        cell("markdown", "Next steps"),
    ]))
    write_manifest(os.path.join(d, "manifest.csv"),
                   [("alpha.ipynb", "grandmaster"), ("beta.ipynb", "Master"), ("gamma.ipynb", "EXPERT")])
    bad = os.path.join(d, "malformed")
    os.makedirs(os.path.join(bad, "notebooks"), exist_ok=True)
    with open(os.path.join(bad, "notebooks", "broken.ipynb"), "w") as f:
        f.write("{\"cells\": 3}\n")
    with open(os.path.join(bad, "notebooks", "garbage.ipynb"), "w") as f:
        f.write("<html>not json</html>\n")
    write_manifest(os.path.join(bad, "manifest.csv"),
                   [("broken.ipynb", "expert"), ("garbage.ipynb", "master"), ("missing.ipynb", "master")])


# 200 distinct words; each sanity markdown uses four of them, none shared.
WORDS = """
acorn anchor anvil apricot arbor arrow aspen atlas aurora avalanche badger balcony bamboo banjo barley basil
beacon beetle bellows birch bison blossom bramble bronze buckle buffalo cabin cactus canyon caramel cargo cedar
cello chalk cherry chimney cinder citrus clover cobalt comet copper coral cotton crater cricket crystal cypress
dagger daisy delta denim desert dolphin dragon drizzle dune eagle ebony echo elbow ember emerald falcon fennel
ferret fiddle flannel flint fossil fox frost galaxy garnet gazelle geyser ginger glacier goblet granite grape
gravel grove gull hammer harbor harvest hazel heron hickory honey horizon hornet husky iceberg igloo indigo iris
ivory jackal jade jasmine jelly juniper kayak kernel kettle kiwi lagoon lantern larch lava lemon lilac linen lizard
lobster lotus lynx magnet mango maple marble marsh meadow melon mesa meteor mint moose mosaic moss nectar nickel
nutmeg oak oasis olive onyx opal orchid otter oyster paddle panther papaya parrot pebble pelican pepper pewter
pine plum pony poppy prairie prism puffin quail quartz quill rabbit radish raven reef ribbon river robin saffron
salmon sapphire satin sequoia shadow sierra silver sparrow spruce squid summit tangerine thistle thunder tiger
timber topaz tulip tundra turtle velvet violet walnut willow yak zebra wombat walrus umber tapir saddle
""".split()


def sanity_corpus(dup):
    assert len(WORDS) == len(set(WORDS)) == 200
    name = "sanity50_dup" if dup else "sanity50"
    d = os.path.join(HERE, name)
    ranks = ["grandmaster", "master", "expert"]
    pairs = []
    for i in range(50):
        md = " ".join(WORDS[4 * i:4 * i + 4]).capitalize()
        code = f"plt.plot(x{i}, y{i})\nplt.title('figure {i}')"
        pairs.append([md, code])
    if dup:
        for i in range(10):
            pairs[40 + i][0] = pairs[i][0]
    rows = []
    for n in range(10):
        cells = []
        for j in range(5):
            md, code = pairs[5 * n + j]
            if j == 2:
                # Two-cell markdown run; joined with a blank line by the pairing rule.
                words = md.split(" ")
                cells.append(cell("markdown", " ".join(words[:2])))
                cells.append(cell("markdown", " ".join(words[2:])))
            else:
                cells.append(cell("markdown", md))
            cells.append(cell("code", code))
        path = f"nb{n:02d}.ipynb"
        write(os.path.join(d, "notebooks", path), notebook(cells))
        rows.append((path, ranks[n % 3]))
    write_manifest(os.path.join(d, "manifest.csv"), rows)


def pair_id(notebook_id, position):
    return hashlib.sha256(f"{notebook_id}\x1f{position}".encode()).hexdigest()[:16]


def expected(notebook_id, position, markdown, code):
    return {"notebook_id": notebook_id, "position": position, "pair_id": pair_id(notebook_id, position),
            "markdown": markdown, "code": code}


# Written by hand from the cell layouts above, not from the library.
def golden_pairs():
    nb = {
        "multi_markdown.ipynb": [
            expected("multi_markdown.ipynb", 2, "# Exploring prices\n\nPrices are skewed, so\nwe look at a log scale.",
                     "import numpy as np\nlog_price = np.log(df.price)"),
            expected("multi_markdown.ipynb", 5, "Distribution of the log price",
                     "plt.hist(log_price, bins=40)\nplt.show()"),
        ],
        "leading_code.ipynb": [
            expected("leading_code.ipynb", 2, "Read the training split", "train = pd.read_csv('train.csv')"),
        ],
        "dangling_markdown.ipynb": [
            expected("dangling_markdown.ipynb", 1, "Fit a baseline", "model.fit(X, y)"),
        ],
        "raw_breaks_run.ipynb": [
            expected("raw_breaks_run.ipynb", 6, "Blank cells inside a run are skipped\n\nScatter of the residuals",
                     "plt.scatter(pred, resid)"),
        ],
        "code_only.ipynb": [],
    }
    write(os.path.join(HERE, "nbformat", "expected_pairs.json"), nb)
    corpus = [
        expected("alpha.ipynb", 1, "# Load the housing table", "import pandas as pd\ndf = pd.read_csv('housing.csv')"),
        expected("alpha.ipynb", 3, "Scatter plot of price against area",
                 "plt.scatter(df.area, df.price)\nplt.xlabel('area')\nplt.show()"),
        expected("beta.ipynb", 3, "Histogram of ages\n\nBin width of five years", "plt.hist(df.age, bins=20)"),
        expected("gamma.ipynb", 1, "Sales share by region as a pie", "fig, ax = plt.subplots()\nax.pie(shares, labels=regions)"),
        expected("gamma.ipynb", 3, "Bar chart of revenue per quarter", "ax.bar(quarters, revenue)"),
    ]
    for e, rank, plot in zip(corpus, ["grandmaster", "grandmaster", "master", "expert", "expert"],
                             [False, True, True, True, True]):
        e["rank"] = rank
        e["plot_related"] = plot
    write(os.path.join(HERE, "corpus", "expected_pairs.json"), corpus)


if __name__ == "__main__":
    nbformat_cases()
    small_corpus()
    sanity_corpus(False)
    sanity_corpus(True)
    golden_pairs()
