"""Planning API endpoints."""

import logging

import numpy as np
from fastapi import APIRouter, Depends, HTTPException, Request
from starlette.concurrency import run_in_threadpool
from starlette.status import (
    HTTP_200_OK,
    HTTP_400_BAD_REQUEST,
    HTTP_404_NOT_FOUND,
    HTTP_500_INTERNAL_SERVER_ERROR,
)

from ..geometry.bounds import Bounds
from ..models.planning import Plan
from ..models.service import (
    EnvironmentRequest,
    EnvironmentResponse,
    PlannersResponse,
    PlanServiceRequest,
    ScenariosResponse,
)
from ..planners.base import PlannerError
from ..services.environment import generate_env
from ..services.planner_factory import PlannerFactory
from ..templates.scenario_manager import ScenarioManager

logger = logging.getLogger(__name__)

router = APIRouter(tags=["planning"])


def get_planner_factory(request: Request) -> PlannerFactory:
    """Get planner factory from app state."""
    return request.app.state.planner_factory


def get_scenario_manager(request: Request) -> ScenarioManager:
    """Get scenario manager from app state."""
    return request.app.state.scenario_manager


@router.get("/planners", response_model=PlannersResponse, summary="List planners")
async def list_planners(
    factory: PlannerFactory = Depends(get_planner_factory),
) -> PlannersResponse:
    return PlannersResponse(planners=factory.get_available_planners())


@router.get("/scenarios", response_model=ScenariosResponse, summary="List scenario presets")
async def list_scenarios(
    manager: ScenarioManager = Depends(get_scenario_manager),
) -> ScenariosResponse:
    return ScenariosResponse(scenarios=manager.describe())


@router.post(
    "/environments",
    response_model=EnvironmentResponse,
    status_code=HTTP_200_OK,
    summary="Generate an environment",
    description="Draw Gaussian prior clusters from a seeded distribution and rasterize them",
)
async def create_environment(body: EnvironmentRequest) -> EnvironmentResponse:
    bounds = Bounds.from_size(body.width, body.height)
    env = generate_env(
        body.distribution,
        bounds,
        body.cell_size,
        np.random.default_rng(body.seed),
        count=body.count,
        seed=body.seed,
    )
    return EnvironmentResponse(spec=env.spec, belief=env.belief.to_document())


@router.post(
    "/plan",
    response_model=Plan,
    status_code=HTTP_200_OK,
    summary="Plan a path",
    description="Run one planning cycle of a named planner on the given belief map",
)
async def create_plan(
    body: PlanServiceRequest,
    factory: PlannerFactory = Depends(get_planner_factory),
) -> Plan:
    """Plan one cycle.

    Raises:
        HTTPException: 404 for unknown planners, 400 for invalid requests
    """
    try:
        request = body.request.to_request()
        planner = factory.get_planner(body.planner, request.config)
        logger.info("Planning with %s, budget %.0f m", body.planner, request.budget)
        return await run_in_threadpool(planner.plan, request)
    except PlannerError as e:
        status = HTTP_404_NOT_FOUND if e.error_code == "UNKNOWN_PLANNER" else HTTP_400_BAD_REQUEST
        logger.warning("Plan request rejected: %s", e.message)
        raise HTTPException(status_code=status, detail=e.message)
    except ValueError as e:
        logger.error(f"Invalid plan request: {e}")
        raise HTTPException(status_code=HTTP_400_BAD_REQUEST, detail=f"Invalid request: {str(e)}")
    except Exception as e:
        logger.error(f"Planning failed: {e}")
        raise HTTPException(
            status_code=HTTP_500_INTERNAL_SERVER_ERROR,
            detail="Internal server error during planning",
        )
