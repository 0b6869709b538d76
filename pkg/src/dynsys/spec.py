# ------ src/dynsys/spec.py ------

"""
Declarative system descriptions: finite maps, digraphs and ODE fields.

The three kinds form a tagged union keyed on the JSON "type" member.
Models are frozen; ODE fields are parsed once, at validation time.
"""

from typing import Annotated, Dict, List, Literal, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, PrivateAttr, field_validator, model_validator

from config.config import MAGNITUDE_CAP
from src.errors import InputError
from src.vfparse.parser import parse_field


def _as_identifier(value):
    if isinstance(value, bool) or not isinstance(value, (str, int)):
        raise ValueError(f"identifiers must be strings or integers, got {value!r}")
    return str(value)


class _SpecBase(BaseModel):
    model_config = ConfigDict(frozen=True, populate_by_name=True, extra='forbid')


class FiniteMapSpec(_SpecBase):
    kind: Literal['finite_map'] = Field('finite_map', alias='type')
    states: List[str]
    map: Dict[str, str]

    @field_validator('states', mode='before')
    @classmethod
    def _states_as_strings(cls, value):
        if not isinstance(value, list):
            return value
        return [_as_identifier(v) for v in value]

    @field_validator('map', mode='before')
    @classmethod
    def _map_as_strings(cls, value):
        if not isinstance(value, dict):
            return value
        return {_as_identifier(k): _as_identifier(v) for k, v in value.items()}

    @model_validator(mode='after')
    def _check_table(self):
        if not self.states:
            raise ValueError('states must be nonempty')
        if len(set(self.states)) != len(self.states):
            raise ValueError('states must be unique')
        declared = set(self.states)
        for state in self.states:
            if state not in self.map:
                raise ValueError(f"state {state!r} has no image")
        for source, image in self.map.items():
            if source not in declared:
                raise ValueError(f"map source {source!r} is not a declared state")
            if image not in declared:
                raise ValueError(f"map image {image!r} is not a declared state")
        return self

    @property
    def labels(self):
        return tuple(self.states)


class DigraphSpec(_SpecBase):
    kind: Literal['digraph'] = Field('digraph', alias='type')
    cells: List[str]
    edges: List[Tuple[str, str]]

    @field_validator('cells', mode='before')
    @classmethod
    def _cells_as_strings(cls, value):
        if not isinstance(value, list):
            return value
        return [_as_identifier(v) for v in value]

    @field_validator('edges', mode='before')
    @classmethod
    def _edges_as_strings(cls, value):
        if not isinstance(value, list):
            return value
        edges = []
        for edge in value:
            if not isinstance(edge, (list, tuple)) or len(edge) != 2:
                raise ValueError(f"edge {edge!r} must be a pair")
            edges.append((_as_identifier(edge[0]), _as_identifier(edge[1])))
        return edges

    @model_validator(mode='after')
    def _check_endpoints(self):
        if not self.cells:
            raise ValueError('cells must be nonempty')
        if len(set(self.cells)) != len(self.cells):
            raise ValueError('cells must be unique')
        declared = set(self.cells)
        for u, v in self.edges:
            for endpoint in (u, v):
                if endpoint not in declared:
                    raise ValueError(f"edge endpoint {endpoint!r} is not a declared cell")
        return self

    @property
    def labels(self):
        return tuple(self.cells)


class IntegratorSpec(_SpecBase):
    method: Literal['rk4'] = 'rk4'
    dt: float = Field(..., gt=0)


class OdeSpec(_SpecBase):
    kind: Literal['ode'] = Field('ode', alias='type')
    dim: int = Field(..., gt=0)
    field: List[str]
    domain: List[Tuple[float, float]]
    integrator: IntegratorSpec
    magnitude_cap: Optional[float] = Field(None, gt=0)

    _exprs: tuple = PrivateAttr(default=())

    @model_validator(mode='after')
    def _check_shape(self):
        if len(self.field) != self.dim:
            raise ValueError(f"field has {len(self.field)} components, dim is {self.dim}")
        if len(self.domain) != self.dim:
            raise ValueError(f"domain has {len(self.domain)} intervals, dim is {self.dim}")
        for axis, (lo, hi) in enumerate(self.domain):
            if not lo < hi:
                raise ValueError(f"domain interval {axis} [{lo}, {hi}] is empty")
        exprs = []
        for axis, text in enumerate(self.field):
            try:
                exprs.append(parse_field(text, self.dim))
            except InputError as exc:
                exc.field = f"field[{axis}]"
                raise
        self._exprs = tuple(exprs)
        return self

    @property
    def exprs(self):
        return self._exprs

    @property
    def dt(self):
        return self.integrator.dt

    @property
    def cap(self):
        return self.magnitude_cap if self.magnitude_cap is not None else MAGNITUDE_CAP

    def with_dt(self, dt):
        """Copy of this spec with a different integrator step."""
        data = self.model_dump(by_alias=True)
        data['integrator']['dt'] = dt
        return OdeSpec.model_validate(data)


SystemSpec = Annotated[Union[FiniteMapSpec, DigraphSpec, OdeSpec], Field(discriminator='kind')]
