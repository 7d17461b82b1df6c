/**
 * Scripted end-to-end walk through the UI against a mocked backend:
 * pick a topic, pick a suggested combination, generate and regenerate copy,
 * edit the buffer, and watch the debounced verdict update.
 */
import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";
import { ApiClient, type Verdict } from "../src/api.js";
import { App, ASSESS_DEBOUNCE_MS } from "../src/app.js";

const CLEAN: Verdict = {
  forbidden: "clean",
  forbidden_reason: "",
  coverage: true,
  creative: true,
  approved: true,
};

const BAD: Verdict = {
  forbidden: "dropped",
  forbidden_reason: "forbidden word: 最好",
  coverage: false,
  creative: true,
  approved: false,
};

const PRODUCTS = [
  { id: "p1", title: "布艺沙发", cid: "c1" },
  { id: "p2", title: "实木茶几", cid: "c2" },
];

type Routes = {
  topics?: () => unknown;
  combinations?: (body: any) => unknown;
  copywriting?: (body: any) => unknown;
  assess?: (body: any) => unknown;
};

function mockBackend(routes: Routes): ReturnType<typeof vi.fn> {
  const fetchMock = vi.fn(async (url: string, init?: RequestInit) => {
    const path = url.replace(/^https?:\/\/[^/]+/, "");
    const body = init?.body ? JSON.parse(init.body as string) : undefined;
    const handler = routes[path.slice(1) as keyof Routes];
    if (!handler) {
      return new Response(JSON.stringify({ detail: `no route: ${path}` }), { status: 404 });
    }
    try {
      return new Response(JSON.stringify(handler(body)), { status: 200 });
    } catch (err) {
      if (err instanceof Response) return err;
      throw err;
    }
  });
  vi.stubGlobal("fetch", fetchMock);
  return fetchMock;
}

function httpError(status: number, detail: string): Response {
  return new Response(JSON.stringify({ detail }), { status });
}

function mountApp(): App {
  const root = document.createElement("div");
  document.body.append(root);
  return new App(root, new ApiClient());
}

function click(node: Element | null): void {
  expect(node).not.toBeNull();
  (node as HTMLElement).dispatchEvent(new MouseEvent("click", { bubbles: true }));
}

function buttonByText(text: string): HTMLButtonElement | null {
  for (const b of Array.from(document.querySelectorAll("button"))) {
    if (b.textContent?.includes(text)) return b as HTMLButtonElement;
  }
  return null;
}

async function flush(): Promise<void> {
  for (let i = 0; i < 10; i += 1) await Promise.resolve();
}

beforeEach(() => {
  document.body.replaceChildren();
});

afterEach(() => {
  vi.unstubAllGlobals();
  vi.restoreAllMocks();
  vi.useRealTimers();
});

describe("assistant round trip", () => {
  it("walks topic -> combination -> generate -> edit -> verdict", async () => {
    vi.useFakeTimers();
    let nextVerdict: Verdict = CLEAN;
    const fetchMock = mockBackend({
      topics: () => ({ topics: ["客厅", "厨房"] }),
      combinations: (body) => {
        expect(body.topic).toBe("客厅");
        return {
          combinations: [{ products: PRODUCTS, score: 0.91, pattern: [["沙发", "茶几"]] }],
        };
      },
      copywriting: (body) => {
        expect(body.product_ids).toEqual(["p1", "p2"]);
        return {
          copy: `第${body.seed}稿：沙发配茶几，温馨一角。`,
          approved: true,
          verdict: CLEAN,
          score: 0.8,
        };
      },
      assess: (body) => {
        expect(body.product_ids).toEqual(["p1", "p2"]);
        return { verdict: nextVerdict };
      },
    });

    const app = mountApp();
    await app.start();
    await flush();
    expect(document.querySelectorAll("button.topic")).toHaveLength(2);

    // pick a topic, wait for suggestions
    click(buttonByText("客厅"));
    await flush();
    const pick = document.querySelector("button.combo-pick");
    expect(pick?.textContent).toContain("布艺沙发 + 实木茶几");
    expect(pick?.textContent).toContain("0.910");

    // before picking products the generate button is gated with a hint
    const generate = buttonByText("Generate copy")!;
    expect(generate.disabled).toBe(true);
    expect(document.querySelector(".hint")?.classList.contains("hidden")).toBe(false);
    expect(document.querySelector(".hint")?.textContent).toContain("at least two products");

    click(pick);
    expect(generate.disabled).toBe(false);
    expect(document.querySelector(".hint")?.classList.contains("hidden")).toBe(true);

    // first generation fills the buffer, verdict, and history
    click(generate);
    await flush();
    const editor = document.querySelector("textarea.editor") as HTMLTextAreaElement;
    expect(editor.value).toBe("第0稿：沙发配茶几，温馨一角。");
    expect(app.session.history).toHaveLength(1);
    expect(document.querySelector(".indicator.forbidden.ok")).not.toBeNull();
    expect(document.querySelector(".indicator.coverage.ok")).not.toBeNull();
    expect(document.querySelector(".indicator.creative.ok")).not.toBeNull();
    expect(document.querySelector(".approved")?.textContent).toBe("Approved");

    // regenerate grows the history without reloading anything
    click(buttonByText("Regenerate"));
    await flush();
    expect(editor.value).toBe("第1稿：沙发配茶几，温馨一角。");
    expect(app.session.history.map((c) => c.copy)).toEqual([
      "第0稿：沙发配茶几，温馨一角。",
      "第1稿：沙发配茶几，温馨一角。",
    ]);

    // editing invalidates the verdict; the re-assess waits out the debounce
    nextVerdict = BAD;
    const assessCallsBefore = fetchMock.mock.calls.filter(([u]) => String(u).endsWith("/assess")).length;
    editor.value = "这款最好的沙发。";
    editor.dispatchEvent(new Event("input", { bubbles: true }));
    expect(app.session.verdict).toBeNull();
    expect(document.querySelector(".pending")?.textContent).toBe("Checking...");

    await vi.advanceTimersByTimeAsync(ASSESS_DEBOUNCE_MS - 1);
    expect(app.session.verdict).toBeNull();
    await vi.advanceTimersByTimeAsync(1);
    await flush();
    const assessCallsAfter = fetchMock.mock.calls.filter(([u]) => String(u).endsWith("/assess")).length;
    expect(assessCallsAfter).toBe(assessCallsBefore + 1);
    expect(app.session.verdict).toEqual(BAD);
    expect(document.querySelector(".indicator.forbidden.bad")?.textContent).toContain("最好");
    expect(document.querySelector(".indicator.coverage.bad")).not.toBeNull();
    expect(document.querySelector(".indicator.creative.ok")).not.toBeNull();
    expect(document.querySelector(".rejected")?.textContent).toBe("Needs work");
  });

  it("coalesces rapid edits into a single assessment", async () => {
    vi.useFakeTimers();
    const fetchMock = mockBackend({
      topics: () => ({ topics: ["客厅"] }),
      combinations: () => ({ combinations: [{ products: PRODUCTS, score: 0.5, pattern: [] }] }),
      copywriting: () => ({ copy: "初稿。", approved: true, verdict: CLEAN, score: 0.5 }),
      assess: (body) => {
        expect(body.copy).toBe("最终文字");
        return { verdict: CLEAN };
      },
    });
    const app = mountApp();
    await app.start();
    await flush();
    click(buttonByText("客厅"));
    await flush();
    click(document.querySelector("button.combo-pick"));
    const editor = document.querySelector("textarea.editor") as HTMLTextAreaElement;
    for (const text of ["最", "最终", "最终文", "最终文字"]) {
      editor.value = text;
      editor.dispatchEvent(new Event("input", { bubbles: true }));
      await vi.advanceTimersByTimeAsync(100);
    }
    await vi.advanceTimersByTimeAsync(ASSESS_DEBOUNCE_MS);
    await flush();
    const assessCalls = fetchMock.mock.calls.filter(([u]) => String(u).endsWith("/assess"));
    expect(assessCalls).toHaveLength(1);
    expect(app.session.verdict).toEqual(CLEAN);
  });

  it("shows a non-blocking banner when suggestions fail", async () => {
    mockBackend({
      topics: () => ({ topics: ["客厅", "厨房"] }),
      combinations: (body) => {
        if (body.topic === "客厅") throw httpError(404, "unknown topic: 客厅");
        return { combinations: [] };
      },
    });
    const app = mountApp();
    await app.start();
    await flush();
    click(buttonByText("客厅"));
    await flush();
    const banner = document.querySelector(".banner")!;
    expect(banner.classList.contains("hidden")).toBe(false);
    expect(banner.textContent).toBe("unknown topic: 客厅");

    // the rest of the UI stays usable: another topic can still be chosen
    click(buttonByText("厨房"));
    await flush();
    expect(document.querySelector(".banner")?.classList.contains("hidden")).toBe(true);
    expect(document.querySelector(".suggestions .empty")?.textContent).toContain(
      "No combinations",
    );
    expect(app.session.topic).toBe("厨房");
  });

  it("keeps the buffer and verdict when generation fails", async () => {
    let failNext = false;
    mockBackend({
      topics: () => ({ topics: ["客厅"] }),
      combinations: () => ({ combinations: [{ products: PRODUCTS, score: 0.5, pattern: [] }] }),
      copywriting: () => {
        if (failNext) throw httpError(500, "decoder exploded");
        return { copy: "可用的一稿。", approved: true, verdict: CLEAN, score: 0.5 };
      },
    });
    const app = mountApp();
    await app.start();
    await flush();
    click(buttonByText("客厅"));
    await flush();
    click(document.querySelector("button.combo-pick"));
    click(buttonByText("Generate copy"));
    await flush();
    expect(app.session.editBuffer).toBe("可用的一稿。");

    failNext = true;
    click(buttonByText("Regenerate"));
    await flush();
    expect(app.session.editBuffer).toBe("可用的一稿。");
    expect(app.session.verdict).toEqual(CLEAN);
    expect(app.session.history).toHaveLength(1);
    expect(document.querySelector(".banner")?.textContent).toBe("decoder exploded");
  });

  it("shows an empty state when a topic has no combinations", async () => {
    mockBackend({
      topics: () => ({ topics: ["阳台"] }),
      combinations: () => ({ combinations: [] }),
    });
    const app = mountApp();
    await app.start();
    await flush();
    click(buttonByText("阳台"));
    await flush();
    expect(document.querySelector(".suggestions .empty")).not.toBeNull();
    expect(document.querySelectorAll("button.combo-pick")).toHaveLength(0);
  });

  it("shows the banner when the backend is unreachable at startup", async () => {
    vi.stubGlobal(
      "fetch",
      vi.fn(async () => {
        throw new TypeError("fetch failed");
      }),
    );
    const app = mountApp();
    await app.start();
    await flush();
    const banner = document.querySelector(".banner")!;
    expect(banner.classList.contains("hidden")).toBe(false);
    expect(banner.textContent).toContain("service unreachable");
  });
});
