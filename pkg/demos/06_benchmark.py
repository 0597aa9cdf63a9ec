"""Desk-scale run of the UDF-overhead benchmark.

Twin tables with identical numbers, scalar columns vs one blob column;
five scan queries measure what a per-row UDF call costs on top of the
plain scan. 50k rows here to keep the demo quick; the CLI default is
one million (`ndblob bench --rows 1000000`).
"""

from ndblob.bench import BenchConfig, bench_run, format_report

result = bench_run(BenchConfig(row_count=50_000))
print(format_report(result), end="")

item_us = result.reports[3].per_call_overhead * 1e6
empty_us = result.reports[4].per_call_overhead * 1e6
print()
print(f"dispatch alone cost {empty_us:.2f} us/row; reading one array element "
      f"through the UDF cost {item_us:.2f} us/row on this machine.")
