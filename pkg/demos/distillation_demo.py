"""The multi-round distillation protocol, on both engines.

One postselected round squares every Fourier weight; register sizes double
between rounds because each round roughly doubles the number of accurate
bits.  The exact engine simulates amplitude vectors; the sparse engine
tracks only the heaviest harmonics in log space and reaches n = 100.
"""
import math

from fourierdistill import (
    plan_schedule,
    run_protocol_exact,
    run_protocol_sparse,
    trace_csv_rows,
)

print("Schedule for a 10-bit target: sizes double from 5, capped at n+2")
sched = plan_schedule(10)
print(f"  sizes = {sched.sizes}, logical width = {sched.width_qubits} qubits")

print()
print("Exact amplitude-level run at n = 10:")
result = run_protocol_exact(10)
for row in trace_csv_rows(result):
    print("  " + row)
print(f"  final error {result.final_error:.3e} vs target "
      f"{result.threshold:.3e} -> meets: {result.meets_threshold}")

print()
print("The first round succeeds about two thirds of the time; later rounds")
print("almost always, because the inputs are already close to pure.")

print()
print("Sparse spectral run at n = 100 (far beyond any amplitude vector):")
big = run_protocol_sparse(100)
for rec in big.rounds:
    log2_err = rec.log_error / math.log(2)
    print(f"  size={rec.size:4d}  p_success={rec.p_success:.12f}  "
          f"log2(error)={log2_err:9.2f}")
print(f"  final log2 error  {big.final_log_error / math.log(2):8.2f}")
print(f"  target log2 bound {big.log_threshold / math.log(2):8.2f}")
print(f"  truncation tail bound stays {math.exp(big.final.output.log_tail):.1e}")

print()
print("Cross-check: both engines on the same 12-bit run")
e = run_protocol_exact(12)
s = run_protocol_sparse(12)
for re, rs in zip(e.rounds, s.rounds):
    print(f"  size={re.size:3d}  p exact={re.p_success:.12f}  "
          f"sparse={rs.p_success:.12f}  |diff|={abs(re.p_success - rs.p_success):.1e}")
