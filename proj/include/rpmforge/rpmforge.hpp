#pragma once

#include "rpmforge/abt.hpp"
#include "rpmforge/core.hpp"
#include "rpmforge/error.hpp"
#include "rpmforge/eval.hpp"
#include "rpmforge/generator.hpp"
#include "rpmforge/rng.hpp"
#include "rpmforge/rule_engine.hpp"
#include "rpmforge/solver.hpp"
#include "rpmforge/splits.hpp"
#include "rpmforge/textio.hpp"
#include "rpmforge/validate.hpp"
