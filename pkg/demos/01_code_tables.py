"""Walk through the three block codes and their error-handling envelopes.

Each code maps 4 message bits onto 7 or 8 channel bits.  The script prints
the minimum distances, classifies every error pattern up to weight 4 under
both decoder modes, and ends with the worst-case/best-case capability table.

Run: python demos/01_code_tables.py
"""

from sfq_ecc.codes import (
    CORRECT,
    DETECT_ONLY,
    analyze_patterns,
    bitstr,
    boolean_forms,
    capability_summary,
    encode,
    make_code,
)

for name in ("hamming74", "hamming84", "rm13"):
    code = make_code(name)
    print(f"\n=== {name}: ({code.n},{code.k}) code, d_min = {code.d_min} ===")
    print("codeword bits as XOR forms:")
    for form in boolean_forms(code):
        tag = "  (pass-through)" if form.passthrough else ""
        print("   " + form.render() + tag)
    print(f"example: encode(1011) = {bitstr(encode(code, '1011'))}")

    for mode in (DETECT_ONLY, CORRECT):
        print(f"\n  error patterns under {mode}:")
        print(f"  {'t':>2} {'total':>6} {'corrected':>10} {'detected':>9} "
              f"{'miscorrected':>13} {'undetected':>11}")
        for t in range(5):
            pa = analyze_patterns(code, mode, t)
            print(f"  {pa.weight:>2} {pa.total:>6} {pa.corrected:>10} "
                  f"{pa.detected:>9} {pa.miscorrected:>13} {pa.undetected:>11}")

print("\n=== capability summary ===")
print(f"{'code':<12}{'d_min':>6}{'worst det':>11}{'worst corr':>12}"
      f"{'best det':>10}{'best corr':>11}")
for name in ("hamming74", "hamming84", "rm13"):
    row = capability_summary(make_code(name)).table_row()
    print(f"{row['code']:<12}{row['d_min']:>6}{row['worst_detect']:>11}"
          f"{row['worst_correct']:>12}{row['best_detect']:>10}{row['best_correct']:>11}")
