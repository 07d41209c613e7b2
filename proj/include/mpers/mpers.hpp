#pragma once

#include "errors.hpp"
#include "exactnum.hpp"
#include "linalg.hpp"
#include "filtration.hpp"
#include "diagram.hpp"
#include "distances.hpp"
#include "oracles.hpp"
#include "io.hpp"
