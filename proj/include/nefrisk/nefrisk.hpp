#pragma once

#include "errors.hpp"
#include "random.hpp"
#include "nef_core.hpp"
#include "special.hpp"
#include "zipf.hpp"
#include "counting.hpp"
#include "claims.hpp"
#include "engine.hpp"
#include "fitting.hpp"
#include "data.hpp"
#include "gof.hpp"
#include "io.hpp"
#include "case_study.hpp"
