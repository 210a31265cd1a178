# Run the benchmark harness on three n=8 instances and print the summary tables.
#
#   python demos/small_bench.py      (writes demos/bench_out/)

from pathlib import Path

from hbpp.bench import BenchmarkConfig, run_benchmark, summary_markdown

config = BenchmarkConfig.load(Path(__file__).with_name("small_bench.json"))
result = run_benchmark(config)
print(summary_markdown(result))
print(f"optimum reached in {result.optimum_rate:.0%} of runs; files in {config.output_dir}")
