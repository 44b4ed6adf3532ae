#pragma once

#include "elan/error.hpp"
#include "elan/eval/evaluation.hpp"
#include "elan/likelihood/branch_model.hpp"
#include "elan/likelihood/engine.hpp"
#include "elan/microc/ast.hpp"
#include "elan/microc/conditions.hpp"
#include "elan/microc/lexer.hpp"
#include "elan/microc/parser.hpp"
#include "elan/microc/printer.hpp"
#include "elan/profile/interpreter.hpp"
#include "elan/profile/profiler.hpp"
#include "elan/ranking/ranker.hpp"
#include "elan/ranking/warnings.hpp"
#include "elan/sdg/builder.hpp"
#include "elan/sdg/export.hpp"
#include "elan/sdg/sdg.hpp"
#include "elan/sdg/slicing.hpp"
