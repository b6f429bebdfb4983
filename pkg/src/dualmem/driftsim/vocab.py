"""Word tables for synthetic apps.

Every function label maps to display synonyms (the canonical display text is
the first entry).  Tokens are kept disjoint across labels so text matching
only succeeds on the intended element.
"""

LABELS: dict[str, tuple[str, ...]] = {
    "settings": ("settings", "preferences", "options", "configuration"),
    "search": ("search", "find", "lookup", "explore"),
    "profile": ("profile", "me", "identity", "persona"),
    "cart": ("cart", "basket", "bag", "trolley"),
    "checkout": ("checkout", "pay", "purchase", "buy"),
    "wifi": ("wifi", "wireless", "wlan", "hotspot"),
    "bluetooth": ("bluetooth", "pairing", "devices", "peripherals"),
    "display": ("display", "screen", "monitor", "visuals"),
    "sound": ("sound", "audio", "volume", "speaker"),
    "battery": ("battery", "power", "charge", "energy"),
    "storage": ("storage", "disk", "space", "drive"),
    "privacy": ("privacy", "permissions", "tracking", "consent"),
    "location": ("location", "gps", "position", "whereabouts"),
    "security": ("security", "lock", "protection", "safety"),
    "language": ("language", "locale", "region", "translation"),
    "keyboard": ("keyboard", "typing", "keys", "ime"),
    "backup": ("backup", "sync", "cloud", "restore"),
    "update": ("update", "upgrade", "patch", "refresh"),
    "camera": ("camera", "shutter", "lens", "capture"),
    "photos": ("photos", "gallery", "album", "pictures"),
    "music": ("music", "songs", "tracks", "tunes"),
    "video": ("video", "movies", "clips", "films"),
    "contacts": ("contacts", "people", "addressbook", "phonebook"),
    "calendar": ("calendar", "agenda", "schedule", "planner"),
    "alarm": ("alarm", "wakeup", "reminder", "buzzer"),
    "timer": ("timer", "countdown", "stopwatch", "hourglass"),
    "notes": ("notes", "memos", "jottings", "notebook"),
    "mail": ("mail", "email", "inbox", "letters"),
    "chat": ("chat", "conversations", "threads", "dialogues"),
    "weather": ("weather", "forecast", "climate", "outlook"),
    "maps": ("maps", "navigation", "directions", "atlas"),
    "wallet": ("wallet", "payments", "cards", "purse"),
    "orders": ("orders", "purchases", "receipts", "invoices"),
    "favorites": ("favorites", "starred", "bookmarks", "liked"),
    "history": ("history", "recent", "timeline", "log"),
    "downloads": ("downloads", "saved", "offline", "fetched"),
    "share": ("share", "send", "forward", "distribute"),
    "filter": ("filter", "refine", "narrow", "sieve"),
    "sort": ("sort", "order", "arrange", "rank"),
    "help": ("help", "support", "assistance", "faq"),
    "feedback": ("feedback", "review", "rating", "opinion"),
    "notifications": ("notifications", "alerts", "badges", "pings"),
    "theme": ("theme", "appearance", "skin", "style"),
    "accessibility": ("accessibility", "a11y", "assistive", "inclusive"),
    "wallpaper": ("wallpaper", "background", "backdrop", "scenery"),
    "ringtone": ("ringtone", "chime", "melody", "tone"),
    "brightness": ("brightness", "luminance", "glow", "backlight"),
    "fonts": ("fonts", "typeface", "lettering", "glyphs"),
    "apps": ("apps", "applications", "programs", "software"),
    "accounts": ("accounts", "logins", "credentials", "signin"),
    "subscriptions": ("subscriptions", "plans", "memberships", "tiers"),
    "coupons": ("coupons", "vouchers", "discounts", "deals"),
    "tickets": ("tickets", "passes", "bookings", "reservations"),
    "flights": ("flights", "airfare", "planes", "airline"),
    "hotels": ("hotels", "lodging", "stays", "rooms"),
    "recipes": ("recipes", "cooking", "dishes", "meals"),
    "workouts": ("workouts", "exercise", "fitness", "training"),
    "sleep": ("sleep", "bedtime", "rest", "nap"),
    "podcasts": ("podcasts", "episodes", "shows", "broadcasts"),
    "news": ("news", "headlines", "stories", "bulletins"),
    "scanner": ("scanner", "qr", "barcode", "reader"),
    "translator": ("translator", "interpreter", "phrasebook", "linguist"),
    "calculator": ("calculator", "arithmetic", "math", "sums"),
    "files": ("files", "documents", "folders", "paperwork"),
    "printer": ("printer", "print", "hardcopy", "output"),
    "vpn": ("vpn", "tunnel", "proxy", "relay"),
    "data": ("data", "cellular", "mobile", "network"),
    "recorder": ("recorder", "dictaphone", "microphone", "voice"),
    "trash": ("trash", "bin", "deleted", "garbage"),
    "archive": ("archive", "vault", "stored", "cabinet"),
    "groups": ("groups", "teams", "circles", "communities"),
    "events": ("events", "happenings", "gatherings", "meetups"),
}

# input label -> (argument role, candidate values)
INPUTS: dict[str, tuple[str, tuple[str, ...]]] = {
    "query box": ("SearchQuery", (
        "jazz", "pizza", "hiking", "sneakers", "tulips", "chess", "kayak", "violin",
        "origami", "salsa", "karate", "pottery")),
    "recipient field": ("ContactName", (
        "alice", "bob", "carol", "dmitri", "esther", "farid", "gwen", "hiro",
        "ingrid", "jamal", "kenji", "lucia")),
    "title input": ("EventTitle", (
        "standup", "brunch", "dentist", "recital", "retro", "picnic", "haircut", "fundraiser",
        "checkup", "webinar", "rehearsal", "barbecue")),
    "amount entry": ("Amount", (
        "twelve", "forty", "ninety", "fifteen", "seventy", "thirty", "eighty", "sixty",
        "eleven", "fifty", "twenty", "ninetynine")),
    "address bar": ("Destination", (
        "airport", "harbor", "stadium", "museum", "library", "campus", "downtown", "uptown",
        "lighthouse", "marina", "plaza", "terminal")),
    "caption field": ("Caption", (
        "sunset", "birthday", "vacation", "graduation", "wedding", "reunion", "holiday", "concert",
        "anniversary", "festival", "sunrise", "snowfall")),
    "filename input": ("FileName", (
        "report", "invoice", "resume", "budget", "thesis", "slides", "minutes", "roadmap",
        "ledger", "draft", "manuscript", "syllabus")),
    "promo code field": ("PromoCode", (
        "spring", "summer", "autumn", "winter", "welcome", "loyalty", "flash", "bonus",
        "harvest", "midnight", "golden", "firstbuy")),
}

# pass-through screens interposed by workflow drift
CONTINUE = ("continue", ("continue", "next", "proceed", "onward"))
DISMISS = ("dismiss", ("dismiss", "close", "cancel", "later"))
