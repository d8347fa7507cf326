from __future__ import annotations

from fastapi import APIRouter, HTTPException

from api.schemas.space import BinOut, SpaceOut
from services.archspace import (
    BinsError,
    SpecError,
    bin_range,
    format_size,
    load_spec,
    make_bins,
    max_total_depth,
    min_total_depth,
    space_size,
)
from services.encoding import SCHEMES, encoding_length

router = APIRouter(prefix="/spaces", tags=["spaces"])


@router.get("/{name}", response_model=SpaceOut)
def get_space(name: str, n_bins: int = 4) -> SpaceOut:
    try:
        spec = load_spec(name)
    except SpecError as exc:
        raise HTTPException(status_code=404, detail=str(exc)) from exc
    try:
        bins = make_bins(spec, n_bins)
    except BinsError as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from exc

    size = space_size(spec)
    return SpaceOut(
        name=spec.name,
        units=len(spec.units),
        size=str(size),
        size_short=format_size(size),
        min_total_depth=min_total_depth(spec),
        max_total_depth=max_total_depth(spec),
        encoding_lengths={s: encoding_length(spec, s) for s in SCHEMES},  # type: ignore[misc]
        bins=[
            BinOut(index=i, min_total=r.start, max_total=r.stop - 1)
            for i, r in ((i, bin_range(bins, i)) for i in range(bins.n_bins))
        ],
    )
