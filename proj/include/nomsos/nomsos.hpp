#pragma once

#include "nomsos/atom.hpp"
#include "nomsos/permutation.hpp"
#include "nomsos/sort.hpp"
#include "nomsos/term.hpp"
#include "nomsos/substitution.hpp"
#include "nomsos/sort_check.hpp"
#include "nomsos/alpha.hpp"
#include "nomsos/freshness.hpp"
#include "nomsos/spec.hpp"
#include "nomsos/parser.hpp"
#include "nomsos/format_check.hpp"
#include "nomsos/engine.hpp"
