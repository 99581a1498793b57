#pragma once

#include "srk/answers.hpp"
#include "srk/bitify.hpp"
#include "srk/cdcl.hpp"
#include "srk/cnf.hpp"
#include "srk/compiler.hpp"
#include "srk/error.hpp"
#include "srk/evaluator.hpp"
#include "srk/external.hpp"
#include "srk/formula.hpp"
#include "srk/semiring.hpp"
#include "srk/sexpr.hpp"
#include "srk/sudoku.hpp"
#include "srk/syntax.hpp"
#include "srk/type.hpp"
#include "srk/typecheck.hpp"
#include "srk/universe.hpp"
#include "srk/unroll.hpp"
