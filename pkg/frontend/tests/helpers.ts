/** Shared test plumbing: fixture loading and a counting fake fetch. */

import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

import type { FetchLike } from "../src/api.js";

const FIXTURES = join(dirname(fileURLToPath(import.meta.url)), "fixtures");

export function fixture<T>(name: string): T {
  return JSON.parse(readFileSync(join(FIXTURES, `${name}.json`), "utf-8")) as T;
}

export interface Route {
  method: string;
  /** path prefix before the query string */
  path: string;
  reply: (url: string, init?: RequestInit) => unknown;
  status?: number;
}

export class FakeServer {
  readonly counts = new Map<string, number>();
  private log: string[] = [];

  constructor(private routes: Route[]) {}

  get fetch(): FetchLike {
    return async (url, init) => {
      const method = (init?.method ?? "GET").toUpperCase();
      const path = url.split("?")[0];
      const route = this.routes.find(
        (r) => r.method === method && matches(r.path, path),
      );
      const key = `${method} ${route ? route.path : path}`;
      this.counts.set(key, (this.counts.get(key) ?? 0) + 1);
      this.log.push(`${method} ${url}`);
      if (!route) {
        return new Response(
          JSON.stringify({ detail: { code: "not_found", message: `no route ${path}` } }),
          { status: 404, headers: { "content-type": "application/json" } },
        );
      }
      return new Response(JSON.stringify(route.reply(url, init)), {
        status: route.status ?? 200,
        headers: { "content-type": "application/json" },
      });
    };
  }

  count(method: string, path: string): number {
    return this.counts.get(`${method} ${path}`) ?? 0;
  }

  requests(): string[] {
    return [...this.log];
  }

  resetCounts(): void {
    this.counts.clear();
    this.log = [];
  }
}

function matches(routePath: string, actual: string): boolean {
  if (!routePath.includes("*")) {
    return routePath === actual;
  }
  const pattern = routePath
    .split("*")
    .map((part) => part.replace(/[.*+?^${}()|[\]\\]/g, "\\$&"))
    .join("[^/]+");
  return new RegExp(`^${pattern}$`).test(actual);
}
