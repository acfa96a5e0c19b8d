#pragma once

#include "pbound/bound.hpp"
#include "pbound/dist_core.hpp"
#include "pbound/errors.hpp"
#include "pbound/golden_section.hpp"
#include "pbound/quadrature.hpp"
#include "pbound/search.hpp"
#include "pbound/special.hpp"
