from fastapi import APIRouter

from .predictions import router as predictions_router
from .spaces import router as spaces_router

router = APIRouter()
router.include_router(spaces_router)
router.include_router(predictions_router)
