#pragma once

#include "hoa/errors.hpp"
#include "hoa/numerics.hpp"
#include "hoa/states.hpp"
#include "hoa/moments.hpp"
#include "hoa/criteria.hpp"
#include "hoa/closedform.hpp"
#include "hoa/montecarlo.hpp"
#include "hoa/io.hpp"
#include "hoa/sweep.hpp"
#include "hoa/figures.hpp"
