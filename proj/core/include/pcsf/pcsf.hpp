#pragma once

#include "pcsf/blowup.hpp"
#include "pcsf/errors.hpp"
#include "pcsf/fit.hpp"
#include "pcsf/flow_rhs.hpp"
#include "pcsf/geometry.hpp"
#include "pcsf/integrator.hpp"
#include "pcsf/normalization.hpp"
#include "pcsf/spectral.hpp"
