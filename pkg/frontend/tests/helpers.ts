import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

const here = dirname(fileURLToPath(import.meta.url));

export function fixture<T>(name: string): T {
  return JSON.parse(readFileSync(join(here, "fixtures", name), "utf-8")) as T;
}

export function fixturePath(name: string): string {
  return join(here, "fixtures", name);
}

export function repoPath(...parts: string[]): string {
  return join(here, "..", "..", ...parts);
}

/** Flush pending microtasks + timers queued by async event handlers. */
export async function settle(rounds = 4): Promise<void> {
  for (let i = 0; i < rounds; i += 1) {
    await new Promise((resolve) => setTimeout(resolve, 0));
  }
}

export function select(root: ParentNode, selector: string): HTMLElement {
  const node = root.querySelector(selector);
  if (!node) throw new Error(`missing ${selector}`);
  return node as HTMLElement;
}

export function setSelectValue(node: HTMLElement, value: string): void {
  (node as HTMLSelectElement).value = value;
  node.dispatchEvent(new Event("change", { bubbles: true }));
}
