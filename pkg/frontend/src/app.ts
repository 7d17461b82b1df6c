/**
 * Framework-free writing-assistant UI.
 *
 * Layout: topic list, combination suggestions for the chosen topic, a working
 * product list, the generated copy in an editable buffer, and a verdict panel
 * with one indicator per server check. All checks run on the server; this
 * layer only renders what the API returns.
 */

import {
  ApiClient,
  ApiError,
  type CombinationSuggestion,
  type ProductRef,
  type Verdict,
} from "./api.js";
import {
  applyEdit,
  applyGeneration,
  applyVerdict,
  canGenerate,
  debounce,
  emptySession,
  selectProducts,
  selectTopic,
  type AssistantSession,
} from "./session.js";

export const ASSESS_DEBOUNCE_MS = 400;

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

export class App {
  session: AssistantSession = emptySession();
  suggestions: CombinationSuggestion[] = [];
  suggestionsLoaded = false;

  private readonly root: HTMLElement;
  private readonly banner: HTMLElement;
  private readonly topicList: HTMLElement;
  private readonly suggestionPanel: HTMLElement;
  private readonly workPanel: HTMLElement;
  private readonly generateButton: HTMLButtonElement;
  private readonly generateHint: HTMLElement;
  private readonly editor: HTMLTextAreaElement;
  private readonly verdictPanel: HTMLElement;
  private readonly historyPanel: HTMLElement;
  private readonly requestAssess: (text: string) => void;

  constructor(
    root: HTMLElement,
    readonly api: ApiClient,
  ) {
    this.root = root;
    this.banner = el("div", "banner hidden");
    this.topicList = el("ul", "topics");
    this.suggestionPanel = el("div", "suggestions");
    this.workPanel = el("div", "working");
    this.generateButton = el("button", "generate", "Generate copy");
    this.generateButton.addEventListener("click", () => {
      void this.generate();
    });
    this.generateHint = el("p", "hint hidden");
    this.editor = el("textarea", "editor");
    this.editor.addEventListener("input", () => {
      this.onEdit(this.editor.value);
    });
    this.verdictPanel = el("div", "verdict");
    this.historyPanel = el("div", "history");
    this.requestAssess = debounce((text: string) => {
      void this.assess(text);
    }, ASSESS_DEBOUNCE_MS);

    const left = el("div", "column");
    left.append(el("h2", undefined, "Topics"), this.topicList, this.suggestionPanel);
    const right = el("div", "column");
    right.append(
      el("h2", undefined, "Draft"),
      this.workPanel,
      this.generateButton,
      this.generateHint,
      this.editor,
      this.verdictPanel,
      this.historyPanel,
    );
    this.root.append(this.banner, left, right);
    this.renderWorkspace();
  }

  async start(): Promise<void> {
    try {
      const topics = await this.api.topics();
      this.renderTopics(topics);
    } catch (err) {
      this.showError(err);
    }
  }

  showError(err: unknown): void {
    if (err instanceof DOMException && err.name === "AbortError") return;
    const message = err instanceof ApiError ? err.message : String(err);
    this.banner.textContent = message;
    this.banner.classList.remove("hidden");
  }

  clearError(): void {
    this.banner.textContent = "";
    this.banner.classList.add("hidden");
  }

  private renderTopics(topics: string[]): void {
    this.topicList.replaceChildren();
    for (const topic of topics) {
      const item = el("li");
      const button = el("button", "topic", topic);
      button.addEventListener("click", () => {
        void this.chooseTopic(topic);
      });
      item.append(button);
      this.topicList.append(item);
    }
  }

  async chooseTopic(topic: string): Promise<void> {
    this.session = selectTopic(this.session, topic);
    this.suggestions = [];
    this.suggestionsLoaded = false;
    this.renderSuggestions();
    this.renderWorkspace();
    try {
      this.suggestions = await this.api.combinations(topic);
      this.suggestionsLoaded = true;
      this.clearError();
    } catch (err) {
      // the banner is non-blocking: topics and the draft stay usable
      this.suggestionsLoaded = true;
      this.showError(err);
    }
    this.renderSuggestions();
  }

  private renderSuggestions(): void {
    this.suggestionPanel.replaceChildren();
    if (this.session.topic === null) return;
    this.suggestionPanel.append(
      el("h3", undefined, `Suggestions for ${this.session.topic}`),
    );
    if (!this.suggestionsLoaded) {
      this.suggestionPanel.append(el("p", "loading", "Loading suggestions..."));
      return;
    }
    if (this.suggestions.length === 0) {
      this.suggestionPanel.append(
        el("p", "empty", "No combinations available for this topic yet."),
      );
      return;
    }
    const list = el("ul", "combos");
    for (const suggestion of this.suggestions) {
      const item = el("li", "combo");
      const titles = suggestion.products.map((p) => p.title).join(" + ");
      const button = el("button", "combo-pick", `${titles} (${suggestion.score.toFixed(3)})`);
      button.addEventListener("click", () => {
        this.chooseProducts(suggestion.products);
      });
      item.append(button);
      list.append(item);
    }
    this.suggestionPanel.append(list);
  }

  chooseProducts(products: ProductRef[]): void {
    this.session = selectProducts(this.session, products);
    this.renderWorkspace();
  }

  private renderWorkspace(): void {
    this.workPanel.replaceChildren();
    if (this.session.products.length === 0) {
      this.workPanel.append(el("p", "empty", "Pick a combination to start a draft."));
    } else {
      const list = el("ul", "products");
      for (const product of this.session.products) {
        list.append(el("li", "product", `${product.title} [${product.cid}]`));
      }
      this.workPanel.append(list);
    }
    const ok = canGenerate(this.session);
    this.generateButton.disabled = !ok;
    this.generateButton.textContent =
      this.session.history.length > 0 ? "Regenerate" : "Generate copy";
    if (ok) {
      this.generateHint.classList.add("hidden");
      this.generateHint.textContent = "";
    } else {
      this.generateHint.classList.remove("hidden");
      this.generateHint.textContent = "Select at least two products to generate copy.";
    }
    if (this.editor.value !== this.session.editBuffer) {
      this.editor.value = this.session.editBuffer;
    }
    this.renderVerdict();
    this.renderHistory();
  }

  async generate(): Promise<void> {
    if (!canGenerate(this.session)) return;
    const seed = this.session.nextSeed;
    const ids = this.session.products.map((p) => p.id);
    try {
      const result = await this.api.copywriting(ids, seed);
      this.session = applyGeneration(this.session, result, seed);
      this.clearError();
      this.renderWorkspace();
    } catch (err) {
      // a failed generation leaves the current buffer and verdict untouched
      this.showError(err);
    }
  }

  onEdit(text: string): void {
    this.session = applyEdit(this.session, text);
    this.renderVerdict();
    this.requestAssess(text);
  }

  async assess(text: string): Promise<void> {
    if (text !== this.session.editBuffer || text === "") return;
    const ids = this.session.products.map((p) => p.id);
    if (ids.length === 0) return;
    try {
      const verdict = await this.api.assess(ids, text);
      this.session = applyVerdict(this.session, text, verdict);
      this.clearError();
      this.renderVerdict();
    } catch (err) {
      this.showError(err);
    }
  }

  private renderVerdict(): void {
    this.verdictPanel.replaceChildren();
    const verdict = this.session.verdict;
    if (this.session.editBuffer === "") return;
    if (verdict === null) {
      this.verdictPanel.append(el("p", "pending", "Checking..."));
      return;
    }
    const list = el("ul", "indicators");
    list.append(
      indicator("forbidden", verdict.forbidden === "clean", labelForbidden(verdict)),
      indicator("coverage", verdict.coverage, verdict.coverage ? "covers all products" : "missing a product mention"),
      indicator("creative", verdict.creative, verdict.creative ? "adds creative content" : "too close to the titles"),
    );
    this.verdictPanel.append(list);
    this.verdictPanel.append(
      el("p", verdict.approved ? "approved" : "rejected", verdict.approved ? "Approved" : "Needs work"),
    );
  }

  private renderHistory(): void {
    this.historyPanel.replaceChildren();
    if (this.session.history.length === 0) return;
    this.historyPanel.append(el("h3", undefined, "Candidates"));
    const list = el("ol", "candidates");
    for (const candidate of this.session.history) {
      const item = el("li", "candidate", candidate.copy);
      item.addEventListener("click", () => {
        this.onEdit(candidate.copy);
        this.editor.value = candidate.copy;
      });
      list.append(item);
    }
    this.historyPanel.append(list);
  }
}

function labelForbidden(verdict: Verdict): string {
  switch (verdict.forbidden) {
    case "clean":
      return "no forbidden words";
    case "altered":
      return `rewritten: ${verdict.forbidden_reason}`;
    case "dropped":
      return `blocked: ${verdict.forbidden_reason}`;
  }
}

function indicator(name: string, ok: boolean, detail: string): HTMLElement {
  const item = el("li", `indicator ${name} ${ok ? "ok" : "bad"}`);
  item.append(el("span", "name", name), el("span", "detail", detail));
  return item;
}
