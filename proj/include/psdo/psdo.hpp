#pragma once

#include "errors.hpp"
#include "rational.hpp"
#include "multi_index.hpp"
#include "window.hpp"
#include "polynomial.hpp"
#include "jet.hpp"
#include "time_poly.hpp"
#include "operator.hpp"
#include "laurent.hpp"
#include "wave.hpp"
#include "hierarchy.hpp"
#include "tau.hpp"
#include "parser.hpp"
#include "json_io.hpp"
