/** Shared test utilities: fixture loading and a recording fake fetch.
 *
 * Fixtures under tests/fixtures/ are verbatim responses captured from the
 * running HTTP service (see scripts/capture_fixtures.py), so every number
 * asserted against them is a genuine server answer.
 */

import { readFileSync } from "node:fs";
import type { FetchLike } from "../src/api.js";

export function fixture<T>(name: string): T {
  const url = new URL(`./fixtures/${name}`, import.meta.url);
  return JSON.parse(readFileSync(url, "utf-8")) as T;
}

export function jsonResponse(body: unknown, status = 200): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "Content-Type": "application/json" },
  });
}

export interface RecordedCall {
  url: string;
  init?: RequestInit;
}

export interface FakeFetch {
  fetch: FetchLike;
  calls: RecordedCall[];
}

/** Build a fetch stub from a handler; every call is recorded. */
export function fakeFetch(
  handler: (url: string, init?: RequestInit) => Response | Promise<Response>,
): FakeFetch {
  const calls: RecordedCall[] = [];
  const fetch: FetchLike = async (url, init) => {
    calls.push({ url, init });
    return handler(url, init);
  };
  return { fetch, calls };
}

export function bodyOf(call: RecordedCall): unknown {
  if (!call.init || typeof call.init.body !== "string") {
    throw new Error("call has no string body");
  }
  return JSON.parse(call.init.body);
}
