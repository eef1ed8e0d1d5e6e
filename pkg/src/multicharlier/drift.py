from charlier import CharlierTable
from polycore import grlex_key


def diff_tables(stored: CharlierTable, reference: CharlierTable) -> list[dict]:
    """Compare an imported table with a freshly built reference.

    Returns one record per drifted index, in graded-lex order:
    MODIFIED (both have it, polynomials differ), MISSING (only the
    reference has it) or EXTRA (only the stored table has it).
    """
    results: list[dict] = []
    every = sorted(set(stored.entries) | set(reference.entries), key=grlex_key)

    for n in every:
        if n not in stored:
            results.append({
                "index": list(n),
                "status": "MISSING",
                "message": f"C_{list(n)} is absent from the stored table",
            })
        elif n not in reference:
            results.append({
                "index": list(n),
                "status": "EXTRA",
                "message": f"C_{list(n)} lies outside the reference range",
            })
        elif stored[n] != reference[n]:
            results.append({
                "index": list(n),
                "status": "MODIFIED",
                "stored": stored[n].to_strings(),
                "expected": reference[n].to_strings(),
                "message": f"C_{list(n)} differs from the recurrence",
            })

    return results


def check_drift(stored: CharlierTable, reference: CharlierTable) -> dict:
    drifted = diff_tables(stored, reference)
    return {
        "check": "drift",
        "pass": not drifted and stored.params == reference.params,
        "checked": len(set(stored.entries) | set(reference.entries)),
        "params_match": stored.params == reference.params,
        "failures": drifted,
    }
