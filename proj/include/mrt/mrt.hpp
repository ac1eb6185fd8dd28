#pragma once

#include "mrt/errors.hpp"
#include "mrt/space.hpp"
#include "mrt/jet.hpp"
#include "mrt/poly.hpp"
#include "mrt/ratexpr.hpp"
#include "mrt/diffalg.hpp"
#include "mrt/exprio.hpp"
#include "mrt/hierarchies.hpp"
#include "mrt/reduction.hpp"
#include "mrt/transform.hpp"
#include "mrt/numoracle.hpp"
#include "mrt/claims.hpp"
