/*
 * Copyright 2026 The HelpRank Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef HELPRANK_PARALLEL_H_
#define HELPRANK_PARALLEL_H_

#include <cstddef>
#include <functional>

namespace helprank {

// Worker count from HELPRANK_THREADS, else the hardware concurrency (>= 1).
int ThreadCount();

// Runs fn(i) for i in [0, n) on up to `threads` workers. Work items are handed
// out in index order; the first exception thrown is rethrown after all
// workers have joined.
void ParallelFor(size_t n, int threads, const std::function<void(size_t)>& fn);

}  // namespace helprank

#endif  // HELPRANK_PARALLEL_H_
