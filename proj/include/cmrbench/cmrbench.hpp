#pragma once

#include "cmrbench/backend.hpp"
#include "cmrbench/classify.hpp"
#include "cmrbench/config.hpp"
#include "cmrbench/corpus.hpp"
#include "cmrbench/errors.hpp"
#include "cmrbench/extract.hpp"
#include "cmrbench/harness.hpp"
#include "cmrbench/http_backend.hpp"
#include "cmrbench/labels.hpp"
#include "cmrbench/language.hpp"
#include "cmrbench/metrics.hpp"
#include "cmrbench/mock_backend.hpp"
#include "cmrbench/prompt.hpp"
#include "cmrbench/section_split.hpp"
#include "cmrbench/synthetic.hpp"
#include "cmrbench/translate.hpp"
#include "cmrbench/types.hpp"
#include "cmrbench/validate.hpp"
#include "cmrbench/version.hpp"
