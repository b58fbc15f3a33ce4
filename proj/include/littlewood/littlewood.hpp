#pragma once

#include "littlewood/errors.hpp"
#include "littlewood/interval.hpp"
#include "littlewood/numtheory.hpp"
#include "littlewood/cubic_field.hpp"
#include "littlewood/units.hpp"
#include "littlewood/padic.hpp"
#include "littlewood/peck.hpp"
#include "littlewood/sequences.hpp"
#include "littlewood/fixtures.hpp"
#include "littlewood/witness_io.hpp"
