#pragma once

#include "ufinsler/curvature.hpp"
#include "ufinsler/dynamics.hpp"
#include "ufinsler/errors.hpp"
#include "ufinsler/expr.hpp"
#include "ufinsler/geometry.hpp"
#include "ufinsler/jet.hpp"
#include "ufinsler/metric.hpp"
#include "ufinsler/parallel.hpp"
#include "ufinsler/sampling.hpp"
#include "ufinsler/tensors.hpp"
