#pragma once

// Everything except the HTTP server and the command line.

#include "newton_lens/analysis.hpp"
#include "newton_lens/analysis_json.hpp"
#include "newton_lens/commands.hpp"
#include "newton_lens/differentiate.hpp"
#include "newton_lens/engine.hpp"
#include "newton_lens/evaluate.hpp"
#include "newton_lens/expr.hpp"
#include "newton_lens/format.hpp"
#include "newton_lens/parser.hpp"
#include "newton_lens/problem.hpp"
#include "newton_lens/scene.hpp"
#include "newton_lens/scene_json.hpp"
#include "newton_lens/scene_svg.hpp"
#include "newton_lens/simplify.hpp"
#include "newton_lens/trace_json.hpp"
