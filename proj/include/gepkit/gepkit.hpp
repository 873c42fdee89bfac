#pragma once

#include "gepkit/ascent.hpp"
#include "gepkit/checks.hpp"
#include "gepkit/decomp.hpp"
#include "gepkit/errors.hpp"
#include "gepkit/generate.hpp"
#include "gepkit/gep.hpp"
#include "gepkit/io.hpp"
#include "gepkit/matrix.hpp"
#include "gepkit/objective.hpp"
#include "gepkit/rng.hpp"
