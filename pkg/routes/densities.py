from fastapi import APIRouter, HTTPException, Query
from pydantic import BaseModel
from typing import Optional

from core import config
from core.densities import constant_P, constant_T, delta_c, delta_general, delta_general_mobius, k_visible_density
from core.errors import ContractViolation, SieveLimitError
from schemas.density import DensityParams, DensityValue

router = APIRouter(prefix="/densities", tags=["densities"])


class VisibleOut(BaseModel):
    k: int
    value: float


class ConstantsOut(BaseModel):
    inv_zeta2: float
    inv_zeta3: float
    inv_zeta3_tail_bound: float
    T: float
    T_tail_bound: float
    T_cutoff: int


@router.get("/visible", response_model=VisibleOut)
def get_visible_density(k: int = Query(1, ge=1)):
    return VisibleOut(k=k, value=k_visible_density(k))


@router.get("/delta", response_model=DensityValue)
def get_delta(
    a0: int = Query(..., ge=1),
    b0: int = Query(..., ge=1),
    r0: int = Query(1, ge=1),
    u0: int = Query(1, ge=1),
    method: str = Query("euler", pattern="^(euler|mobius)$"),
    depth: int = Query(10_000, ge=1),
):
    params = DensityParams(a0=a0, b0=b0, r0=r0, u0=u0)
    if method == "euler":
        return delta_general(params)
    try:
        return delta_general_mobius(params, depth)
    except SieveLimitError as e:
        raise HTTPException(status_code=400, detail=str(e))


@router.get("/step", response_model=DensityValue)
def get_step_density(c: int = Query(..., ge=1)):
    try:
        return delta_c(c)
    except ContractViolation as e:
        raise HTTPException(status_code=400, detail=str(e))


@router.get("/constants", response_model=ConstantsOut)
def get_constants(cutoff: Optional[int] = Query(None, ge=100)):
    cutoff = cutoff or config.T_CUTOFF
    try:
        p = constant_P()
        t = constant_T(cutoff)
    except SieveLimitError as e:
        raise HTTPException(status_code=400, detail=str(e))
    return ConstantsOut(
        inv_zeta2=k_visible_density(1),
        inv_zeta3=p.value,
        inv_zeta3_tail_bound=p.tail_bound,
        T=t.value,
        T_tail_bound=t.tail_bound,
        T_cutoff=cutoff,
    )
