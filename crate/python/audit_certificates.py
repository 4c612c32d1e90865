#!/usr/bin/env python3
"""Check universality certificates using nothing but their JSON.

Usage: audit_certificates.py OUTPUT.json [...]

OUTPUT.json is written by `pade universal --out` or by the acceptance
suite. For every stage the triangle-inequality budget
fit error + |d| max|z|^p + approximant discrepancy must bound err_on_K,
and the pass flag must agree with the recorded thresholds.
"""
import json
import sys


def audit_stage(cert):
    problems = []
    b = cert.get("budget") or {}
    parts = [b.get("fit_error_on_k"), b.get("perturbation_bound_on_k"), b.get("approximant_discrepancy_on_k")]
    err = cert.get("err_on_k")
    if any(v is None for v in parts) or err is None:
        return ["missing or non-finite budget fields"]
    total = sum(parts)
    if not total >= err:
        problems.append(f"budget {total:.6e} < err_on_K {err:.6e}")
    t = cert["thresholds"]
    expect = (
        cert["membership_ok"]
        and all(m["hankel"]["member"] for m in cert["membership"])
        and cert["err_on_k"] < t["one_over_s"]
        and cert["err_on_lprime"] < t["one_over_s"]
        and cert["err_vs_previous_on_ldoubleprime"] < t["eps_stage"]
    )
    if bool(cert["pass"]) != expect:
        problems.append(f"pass flag {cert['pass']} disagrees with thresholds")
    return problems


def main(paths):
    failed = 0
    for path in paths:
        with open(path) as fh:
            doc = json.load(fh)
        stages = doc.get("stages") or []
        if not stages:
            print(f"FAIL {path}: no stages")
            failed += 1
            continue
        for st in stages:
            cert = st["certificate"]
            problems = audit_stage(cert)
            b = cert["budget"]
            total = sum(b[k] for k in ("fit_error_on_k", "perturbation_bound_on_k", "approximant_discrepancy_on_k")) if not problems else float("nan")
            status = "FAIL" if problems else "PASS"
            print(f"{status} {path} stage {cert['stage']} [{cert['p']}/{cert['q']}]: "
                  f"budget {total:.3e} vs err_on_K {cert['err_on_k']:.3e}" + ("; " + "; ".join(problems) if problems else ""))
            failed += bool(problems)
    return 1 if failed else 0


if __name__ == "__main__":
    if len(sys.argv) < 2:
        sys.exit(__doc__)
    sys.exit(main(sys.argv[1:]))
