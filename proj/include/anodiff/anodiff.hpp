#pragma once

#include "anodiff/actuation.hpp"
#include "anodiff/config.hpp"
#include "anodiff/coverage.hpp"
#include "anodiff/error.hpp"
#include "anodiff/grid.hpp"
#include "anodiff/manufactured.hpp"
#include "anodiff/operators.hpp"
#include "anodiff/scenario.hpp"
#include "anodiff/sensing.hpp"
#include "anodiff/solver.hpp"
#include "anodiff/special.hpp"
#include "anodiff/verification.hpp"
