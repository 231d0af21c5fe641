from typing import List


def parse_int_list(value: str) -> List[int]:
    """Parse "1,2,1" (spaces and brackets tolerated) into [1, 2, 1]."""
    cleaned = value.strip().strip("[]()")
    if not cleaned:
        return []
    try:
        return [int(part) for part in cleaned.split(",") if part.strip() != ""]
    except ValueError as exc:
        raise ValueError(f"expected comma-separated integers, got {value!r}") from exc
