// Convenience umbrella for the whole library.
#pragma once

#include "knowhunt/evalharness.hpp"
#include "knowhunt/evidence.hpp"
#include "knowhunt/lexicon.hpp"
#include "knowhunt/pipeline.hpp"
#include "knowhunt/querygen.hpp"
#include "knowhunt/resolver.hpp"
#include "knowhunt/retrieval.hpp"
#include "knowhunt/schema.hpp"
#include "knowhunt/text.hpp"
