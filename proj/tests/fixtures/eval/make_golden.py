"""Recomputes expected.report from the canned readings, independently of the C++ code."""
import json
import math
import pathlib

here = pathlib.Path(__file__).parent


def norm(s):
    return " ".join(s.split())


def lev(a, b):
    d = [[0] * (len(b) + 1) for _ in range(len(a) + 1)]
    for i in range(len(a) + 1):
        d[i][0] = i
    for j in range(len(b) + 1):
        d[0][j] = j
    for i in range(1, len(a) + 1):
        for j in range(1, len(b) + 1):
            d[i][j] = min(d[i - 1][j] + 1, d[i][j - 1] + 1, d[i - 1][j - 1] + (a[i - 1] != b[j - 1]))
    return d[-1][-1]


def pct(f):
    units = math.floor(abs(f) * 10000 + 1e-7)
    s = str(units // 100)
    if units % 100:
        s += "." + f"{units % 100:02d}".rstrip("0")
    return ("-" if f < 0 and units else "") + s + "%"


def signed(f):
    return ("+" if f > 0 else "") + pct(f)


rows = []
for line in (here / "manifest.tsv").read_text().splitlines():
    if not line or line.startswith("#"):
        continue
    doc, _, truth_path = line.split("\t")
    truth = norm((here / truth_path).read_text())
    n = len(truth)
    raw = lev(truth, norm((here / "ocr" / f"{doc}.raw.txt").read_text()))
    proc = lev(truth, norm((here / "ocr" / f"{doc}.proc.txt").read_text()))
    ra, pa = (n - raw) / n, (n - proc) / n
    rows.append(dict(doc_id=doc, n=n, raw_errors=raw, raw_accuracy=ra, proc_errors=proc, proc_accuracy=pa, delta=pa - ra))

out = "".join(json.dumps(r, separators=(",", ":")) + "\n" for r in rows)
k = len(rows)
mr = sum(r["raw_accuracy"] for r in rows) / k
mp = sum(r["proc_accuracy"] for r in rows) / k
md = sum(r["delta"] for r in rows) / k
agg = dict(documents=k, mean_raw_accuracy=mr, mean_proc_accuracy=mp, mean_delta=md)
out += json.dumps({"aggregate": agg}, separators=(",", ":")) + "\n\n"

table = [["Document ID", "Chars", "Original Errors", "Original Accuracy", "Processed Errors", "Processed Accuracy", "Delta"]]
for r in rows:
    table.append([r["doc_id"], str(r["n"]), str(r["raw_errors"]), pct(r["raw_accuracy"]), str(r["proc_errors"]),
                  pct(r["proc_accuracy"]), signed(r["delta"])])
table.append(["Mean", "", "", pct(mr), "", pct(mp), signed(md)])
widths = [max(len(row[c]) for row in table) for c in range(7)]
for row in table:
    cells = [row[0].ljust(widths[0])] + [row[c].rjust(widths[c]) for c in range(1, 7)]
    out += "  ".join(cells).rstrip() + "\n"

(here / "expected.report").write_text(out)
