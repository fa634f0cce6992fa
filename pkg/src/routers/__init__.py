"""API routers for the IPP planning service.

Package marker without side-effect imports; import submodules directly.
"""

__all__: list[str] = []
