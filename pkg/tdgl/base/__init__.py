from tdgl.base.fields import (  # noqa
    AppliedField, CenterField, EdgeField, FaceField, OrderParameterField, VectorPotentialField,
)
from tdgl.base.params import PhysParams, SimState, TimeDisc  # noqa
